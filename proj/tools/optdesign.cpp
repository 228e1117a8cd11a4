// optdesign command-line front end.
//
// Exit codes: 0 success (and certified), 1 input error, 2 numerical failure or
// a reproduction mismatch.

#include "optdesign/error.hpp"
#include "optdesign/io.hpp"
#include "optdesign/optimize.hpp"
#include "optdesign/reproduce.hpp"
#include "optdesign/transforms.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

using namespace optdesign;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNumericalFailure = 2;

struct Options {
  std::string model = "";
  std::string beta;
  std::string criterion;
  std::string design;
  std::string transform;
  std::string out;
  std::string target;
  std::uint64_t seed = kDefaultSeed;
  int grid = 8;
  double fixed_w = -1.0;
  bool inverse = false;
  bool assert_optimal = false;
  bool include_limit = false;
  bool json = false;
};

ModelSpec load_model(const Options& o) {
  if (o.model.empty()) {
    throw DesignError(ErrorKind::InvalidInput, "--model is required");
  }
  return model_from_json(read_json_file(o.model));
}

Criterion load_criterion(const Options& o, const ModelSpec& model) {
  if (o.criterion.empty() || o.criterion == "D" || o.criterion == "d") return Criterion::d();
  if (o.criterion == "IMSE" || o.criterion == "imse") {
    return Criterion::imse(WeightingMeasure::uniform_over(model.region()));
  }
  return criterion_from_json(read_json_file(o.criterion), model);
}

Parameter load_beta(const Options& o, const ModelSpec& model) {
  if (o.beta.empty()) throw DesignError(ErrorKind::InvalidInput, "--beta is required");
  Parameter beta = parse_beta(o.beta);
  if (beta.size() != model.p()) {
    throw DesignError(ErrorKind::InvalidInput, "beta has " + std::to_string(beta.size()) +
                                                   " entries, the model needs " +
                                                   std::to_string(model.p()));
  }
  check_parameter(model, beta);
  return beta;
}

void emit(const Options& o, const Json& j) {
  if (o.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text_file(o.out, j.dump(2) + "\n");
  }
}

void print_table(const Design& xi) {
  const Design s = xi.sorted();
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::cout << "  (";
    for (Eigen::Index k = 0; k < s.point(i).size(); ++k) std::cout << (k ? ", " : "") << s.point(i)[k];
    std::cout << ")  " << format_weight(s.weight(i)) << "\n";
  }
}

void print_certificate(const Certificate& c) {
  std::cout << "certificate: max sensitivity " << c.max_sensitivity << ", bound " << c.bound << " over "
            << c.points_checked << " points: " << (c.passed ? "passed" : "FAILED") << "\n";
}

int cmd_info(const Options& o) {
  const ModelSpec model = load_model(o);
  std::cout << "dimension " << model.dim_x() << ", parameters " << model.p() << ", "
            << (model.region().is_box() ? "box region" : "finite region") << ", kappa "
            << model.intensity().kappa() << "\n";
  std::cout << "extremal points:\n";
  for (const auto& x : model.region().extremal_points()) {
    std::cout << "  " << vector_to_json(x).dump() << "\n";
  }
  if (!o.beta.empty()) {
    const Parameter beta = load_beta(o, model);
    std::cout << "beta " << vector_to_json(beta).dump() << " is admissible\n";
    for (const auto& x : model.region().extremal_points()) {
      const double z = model.basis(x).dot(beta);
      std::cout << "  " << vector_to_json(x).dump() << "  linear component " << z << ", intensity "
                << intensity(model, z) << "\n";
    }
  }
  return kOk;
}

int cmd_optimize(const Options& o) {
  const ModelSpec model = load_model(o);
  const Parameter beta = load_beta(o, model);
  const Criterion crit = load_criterion(o, model);
  const OptimizationResult res = local_opt_design(model, beta, crit);
  Json j = result_to_json(res);
  j["criterion"] = criterion_to_json(crit);
  j["beta"] = vector_to_json(beta);
  if (o.json || !o.out.empty()) {
    emit(o, j);
  }
  if (!o.json) {
    std::cout << (crit.is_d() ? "D" : "IMSE") << "-optimal design (criterion value "
              << res.criterion_value << ", " << res.iterations << " iterations):\n";
    print_table(res.design);
    print_certificate(res.certificate);
  }
  return res.certificate.passed ? kOk : kNumericalFailure;
}

int cmd_check(const Options& o) {
  const ModelSpec model = load_model(o);
  const Parameter beta = load_beta(o, model);
  const Criterion crit = load_criterion(o, model);
  if (o.design.empty()) throw DesignError(ErrorKind::InvalidInput, "--design is required");
  const Design xi = design_from_json(read_json_file(o.design));
  validate_design(model, xi);
  const Certificate cert = equivalence_check(model, xi, beta, crit);
  if (o.json || !o.out.empty()) emit(o, certificate_to_json(cert));
  if (!o.json) print_certificate(cert);
  return cert.passed ? kOk : kNumericalFailure;
}

int cmd_transfer(const Options& o) {
  const ModelSpec model = load_model(o);
  if (o.design.empty() || o.transform.empty()) {
    throw DesignError(ErrorKind::InvalidInput, "--design and --transform are required");
  }
  const Criterion crit = load_criterion(o, model);
  const Design xi = design_from_json(read_json_file(o.design));
  TransformPair pair = [&] {
    // a transform flag that is not a file is read as a named map
    if (std::filesystem::exists(o.transform)) return transform_from_json(read_json_file(o.transform), model);
    return transform_from_json(Json(o.transform), model);
  }();
  if (o.inverse) pair = make_pair(model, pair.g().inverse(), pair.mode());
  validate_design(model, xi);
  const Parameter beta = load_beta(o, model);

  const TransferredDesign t = transfer_optimal(model, xi, beta, pair, crit);
  Json j;
  j["design"] = design_to_json(t.design);
  j["beta"] = vector_to_json(t.beta);
  j["model"] = model_to_json(t.model);
  j["transform"] = transform_to_json(pair);
  if (t.nu) j["nu"] = measure_to_json(*t.nu);
  int code = kOk;
  if (o.assert_optimal) {
    const Criterion image_crit = t.nu ? Criterion::imse(*t.nu, crit.quadrature_order) : Criterion::d();
    const Certificate cert = equivalence_check(t.model, t.design, t.beta, image_crit);
    j["certificate"] = certificate_to_json(cert);
    if (!cert.passed) code = kNumericalFailure;
  }
  if (o.json || !o.out.empty()) emit(o, j);
  if (!o.json) {
    std::cout << "image parameter " << vector_to_json(t.beta).dump() << "\n";
    print_table(t.design);
    if (j.contains("certificate")) {
      std::cout << "re-certification: " << (code == kOk ? "passed" : "FAILED") << " (max sensitivity "
                << j["certificate"]["max_sensitivity"].get<double>() << ", bound "
                << j["certificate"]["bound"].get<double>() << ")\n";
    }
  }
  return code;
}

int cmd_maximin(const Options& o) {
  const ModelSpec model = o.model.empty()
                              ? ModelSpec::first_order(Region::box(Vector::Zero(2), Vector::Ones(2)))
                              : load_model(o);
  if (model.dim_x() != 2 || !model.region().is_box() ||
      (model.region().lower().array() != 0.0).any() || (model.region().upper().array() != 1.0).any()) {
    throw DesignError(ErrorKind::WrongModelShape, "maximin runs the equal-slopes family on [0,1]^2");
  }
  const Criterion crit = Criterion::d();
  const InvariantFamily family = equal_slopes_family();
  std::vector<Parameter> grid;
  for (double g : equal_slopes_gamma_grid(o.grid)) {
    Parameter b(3);
    b << 1.0, g, g;
    grid.push_back(b);
  }
  MaximinOptions mo;
  mo.include_gamma_infinity_limit = o.include_limit;
  const MaximinResult r = o.fixed_w >= 0.0 ? evaluate_invariant(model, crit, family, o.fixed_w, grid, mo)
                                           : maximin_invariant(model, crit, family, grid, mo);
  std::cout << "w = " << r.w << ", minimal D-efficiency " << r.min_efficiency << "\n";
  if (r.worst_at_limit) std::cout << "worst case: gamma -> infinity limit\n";
  if (r.worst_at_grid_edge) std::cout << "worst case at the largest grid parameter (supremum may not be attained)\n";
  print_table(r.design);
  if (!o.out.empty()) {
    std::string csv = "param,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv += Json(grid[i][1]).dump() + "," + Json(r.efficiencies[i]).dump() + "\n";
    }
    write_text_file(o.out, csv);
  }
  return kOk;
}

int cmd_reproduce(const Options& o) {
  const std::vector<std::string> targets =
      o.target == "all" ? std::vector<std::string>{"table1", "table2", "prop1", "fig3", "fig4"}
                        : std::vector<std::string>{o.target};
  bool ok = true;
  for (const auto& t : targets) {
    const ReproReport rep = reproduce(t, o.seed);
    std::cout << rep.summary();
    ok = ok && rep.passed();
    if (!o.out.empty() && !rep.csv.empty()) {
      std::filesystem::create_directories(o.out);
      const auto path = std::filesystem::path(o.out) / (t + ".csv");
      write_text_file(path.string(), rep.csv);
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  return ok ? kOk : kNumericalFailure;
}

int exit_code(const DesignError& e) {
  switch (e.kind()) {
    case ErrorKind::NoConvergence:
    case ErrorKind::EquivalenceCheckFailed:
    case ErrorKind::DegenerateSample:
      return kNumericalFailure;
    default:
      return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally optimal designs for gamma models with inverse link"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "model JSON file")->check(CLI::ExistingFile);
    sub->add_option("--beta", o.beta, "parameter vector, e.g. 1,3,3 or 1,-3/7,-3/7");
    sub->add_option("--out", o.out, "output file");
    sub->add_flag("--json", o.json, "print JSON instead of a table");
  };

  auto* info = app.add_subcommand("info", "describe a model and check a parameter");
  add_common(info);

  auto* optimize = app.add_subcommand("optimize", "locally optimal design with certificate");
  add_common(optimize);
  optimize->add_option("--criterion", o.criterion, "criterion JSON file, or D / IMSE");

  auto* check = app.add_subcommand("check", "equivalence check of a design");
  add_common(check);
  check->add_option("--criterion", o.criterion, "criterion JSON file, or D / IMSE");
  check->add_option("--design", o.design, "design JSON file")->check(CLI::ExistingFile);

  auto* transfer = app.add_subcommand("transfer", "carry an optimal design through a transformation");
  add_common(transfer);
  transfer->add_option("--criterion", o.criterion, "criterion JSON file, or D / IMSE");
  transfer->add_option("--design", o.design, "design JSON file")->check(CLI::ExistingFile);
  transfer->add_option("--transform", o.transform, "transform JSON file or a named map");
  transfer->add_flag("--inverse", o.inverse, "apply the inverse transformation");
  transfer->add_flag("--assert-optimal", o.assert_optimal, "re-certify the image design");

  auto* maximin = app.add_subcommand("maximin", "maximin D-efficient equal-slopes invariant design");
  add_common(maximin);
  maximin->add_option("--grid", o.grid, "grid points per decade")->check(CLI::PositiveNumber);
  maximin->add_option("--fixed-w", o.fixed_w, "evaluate this w instead of searching");
  maximin->add_flag("--include-gamma-infinity-limit", o.include_limit, "add the gamma -> infinity term");

  auto* repro = app.add_subcommand("reproduce", "recompute a table or figure");
  repro->add_option("target", o.target, "table1, table2, prop1, fig3, fig4 or all")->required();
  repro->add_option("--seed", o.seed, "seed for randomized checks");
  repro->add_option("--out", o.out, "directory for CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (*info) return cmd_info(o);
    if (*optimize) return cmd_optimize(o);
    if (*check) return cmd_check(o);
    if (*transfer) return cmd_transfer(o);
    if (*maximin) return cmd_maximin(o);
    if (*repro) return cmd_reproduce(o);
  } catch (const DesignError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: InvalidInput: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
