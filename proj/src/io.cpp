#include "optdesign/io.hpp"

#include "optdesign/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace optdesign {

namespace {

[[noreturn]] void bad(const std::string& what) { throw DesignError(ErrorKind::InvalidInput, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::vector<Point> points_from_json(const Json& j) {
  if (!j.is_array()) bad("point list must be an array");
  std::vector<Point> out;
  for (const auto& p : j) out.push_back(vector_from_json(p));
  return out;
}

Json points_to_json(const std::vector<Point>& pts) {
  Json out = Json::array();
  for (const auto& p : pts) out.push_back(vector_to_json(p));
  return out;
}

std::vector<double> doubles_from_json(const Json& j) {
  if (!j.is_array()) bad("weights must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) bad("weights must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("matrix must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(vector_from_json(j[0]).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)]);
    if (row.size() != cols) bad("matrix rows differ in length");
    m.row(r) = row.transpose();
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

double parse_number(const std::string& tok) {
  const auto slash = tok.find('/');
  std::size_t used = 0;
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(tok, &used);
      if (used != tok.size()) bad("cannot parse number \"" + tok + "\"");
      return v;
    }
    const std::string num = tok.substr(0, slash);
    const std::string den = tok.substr(slash + 1);
    std::size_t used_den = 0;
    const double n = std::stod(num, &used);
    const double d = std::stod(den, &used_den);
    if (used != num.size() || used_den != den.size() || d == 0.0) {
      bad("cannot parse fraction \"" + tok + "\"");
    }
    return n / d;
  } catch (const std::logic_error&) {
    bad("cannot parse number \"" + tok + "\"");
  }
}

}  // namespace

Vector vector_from_json(const Json& j) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) bad("vector must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_number()) {
      v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    } else if (j[i].is_string()) {
      v[static_cast<Eigen::Index>(i)] = parse_number(j[i].get<std::string>());
    } else {
      bad("vector entries must be numbers");
    }
  }
  return v;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

ModelSpec model_from_json(const Json& j) {
  const std::string basis = j.value("basis", std::string("linear"));
  if (basis != "linear" && basis != "additive") {
    bad("unknown basis \"" + basis + "\" (built-in: linear, additive)");
  }
  const Json& reg = field(j, "region");
  Region region = reg.contains("points")
                      ? Region::finite(points_from_json(reg.at("points")))
                      : Region::box(vector_from_json(field(reg, "lower")),
                                    vector_from_json(field(reg, "upper")));
  if (j.contains("dim_x") && j.at("dim_x").get<int>() != region.dim()) {
    bad("dim_x does not match the region dimension");
  }
  return ModelSpec::first_order(std::move(region), j.value("kappa", 1.0));
}

Json model_to_json(const ModelSpec& model) {
  if (!model.builtin()) bad("only built-in models serialize to JSON");
  Json reg;
  if (model.region().is_box()) {
    reg["lower"] = vector_to_json(model.region().lower());
    reg["upper"] = vector_to_json(model.region().upper());
  } else {
    reg["points"] = points_to_json(model.region().candidates());
  }
  return {{"dim_x", model.dim_x()},
          {"basis", "linear"},
          {"region", reg},
          {"kappa", model.intensity().kappa()}};
}

Design design_from_json(const Json& j) {
  return Design(points_from_json(field(j, "support")), doubles_from_json(field(j, "weights")));
}

Json design_to_json(const Design& xi) {
  return {{"support", points_to_json(xi.support())}, {"weights", xi.weights()}};
}

WeightingMeasure measure_from_json(const Json& j, const ModelSpec& model) {
  const std::string kind = j.value("kind", std::string("uniform"));
  if (kind == "uniform") {
    if (j.contains("lower") || j.contains("upper")) {
      return WeightingMeasure::uniform(vector_from_json(field(j, "lower")),
                                       vector_from_json(field(j, "upper")));
    }
    return WeightingMeasure::uniform_over(model.region());
  }
  if (kind == "discrete") {
    return WeightingMeasure::discrete(points_from_json(field(j, "points")),
                                      doubles_from_json(field(j, "weights")));
  }
  bad("unknown measure kind \"" + kind + "\"");
}

Json measure_to_json(const WeightingMeasure& nu) {
  if (nu.is_uniform()) {
    return {{"kind", "uniform"}, {"lower", vector_to_json(nu.lower())}, {"upper", vector_to_json(nu.upper())}};
  }
  return {{"kind", "discrete"}, {"points", points_to_json(nu.points())}, {"weights", nu.weights()}};
}

Criterion criterion_from_json(const Json& j, const ModelSpec& model) {
  std::string kind = j.value("kind", std::string(j.contains("nu") ? "IMSE" : "D"));
  for (auto& c : kind) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (kind == "D") return Criterion::d();
  if (kind == "IMSE") {
    const Json nu = j.contains("nu") ? j.at("nu") : Json{{"kind", "uniform"}};
    Criterion crit = Criterion::imse(measure_from_json(nu, model),
                                     j.value("quadrature_order", kDefaultQuadratureOrder));
    validate_measure(model, crit.measure());
    return crit;
  }
  bad("unknown criterion kind \"" + kind + "\"");
}

Json criterion_to_json(const Criterion& crit) {
  if (crit.is_d()) return {{"kind", "D"}};
  return {{"kind", "IMSE"}, {"nu", measure_to_json(crit.measure())}, {"quadrature_order", crit.quadrature_order}};
}

TransformPair transform_from_json(const Json& j, const ModelSpec& model) {
  if (j.is_string()) return make_pair(model, named_map(j.get<std::string>(), model.region()));
  const ParamMode mode = parse_param_mode(j.value("param_mode", std::string("linear")));
  if (j.contains("name")) {
    return make_pair(model, named_map(j.at("name").get<std::string>(), model.region()), mode);
  }
  const Matrix a = matrix_from_json(field(j, "a"));
  const Vector b = j.contains("b") ? vector_from_json(j.at("b")) : Vector(Vector::Zero(a.rows()));
  if (a.rows() != model.dim_x() || a.cols() != model.dim_x() || b.size() != model.dim_x()) {
    bad("transform dimensions do not match the model");
  }
  return make_pair(model, AffinePointMap(a, b), mode);
}

Json transform_to_json(const TransformPair& pair) {
  return {{"a", matrix_to_json(pair.g().a())},
          {"b", vector_to_json(pair.g().b())},
          {"q", matrix_to_json(pair.q())},
          {"param_mode", to_string(pair.mode())}};
}

std::vector<TransformPair> generators_from_json(const Json& j, const ModelSpec& model) {
  const ParamMode mode = parse_param_mode(j.value("param_mode", std::string("linear")));
  std::vector<TransformPair> out;
  for (const auto& g : field(j, "generators")) {
    if (g.is_string()) {
      out.push_back(make_pair(model, named_map(g.get<std::string>(), model.region()), mode));
    } else {
      Json copy = g;
      copy["param_mode"] = to_string(mode);
      out.push_back(transform_from_json(copy, model));
    }
  }
  return out;
}

Json orbits_to_json(const OrbitPartition& partition) {
  return {{"orbits", partition.orbits}};
}

Json certificate_to_json(const Certificate& cert) {
  return {{"max_sensitivity", cert.max_sensitivity},
          {"bound", cert.bound},
          {"argmax", vector_to_json(cert.argmax)},
          {"passed", cert.passed},
          {"points_checked", cert.points_checked}};
}

Json result_to_json(const OptimizationResult& result) {
  return {{"design", design_to_json(result.design)},
          {"criterion_value", result.criterion_value},
          {"certificate", certificate_to_json(result.certificate)},
          {"iterations", result.iterations}};
}

Parameter parse_beta(const std::string& text) {
  std::string s = text;
  const auto first = s.find_first_not_of(" \t");
  if (first != std::string::npos && s[first] == '[') {
    try {
      return vector_from_json(Json::parse(s));
    } catch (const Json::exception&) {
      // fall through to the token parser, e.g. "[1, -3/7]"
    }
  }
  for (auto& c : s) {
    if (c == ',' || c == '[' || c == ']' || c == ';' || c == '"') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> vals;
  for (std::string tok; in >> tok;) vals.push_back(parse_number(tok));
  if (vals.empty()) bad("empty parameter vector");
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open \"" + path + "\"");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad("malformed JSON in \"" + path + "\": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) bad("cannot write \"" + path + "\"");
  out << text;
}

std::string format_weight(double w) {
  if (std::abs(w) < 5e-4) return "0.000";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", w);
  return buf;
}

}  // namespace optdesign
