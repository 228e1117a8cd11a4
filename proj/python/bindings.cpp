// JSON-string bridge to the C++ core; python/optdesign/__init__.py wraps it with dicts.

#include "optdesign/error.hpp"
#include "optdesign/io.hpp"
#include "optdesign/optimize.hpp"
#include "optdesign/reproduce.hpp"
#include "optdesign/transforms.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace optdesign;

namespace {

Parameter beta_of(const std::vector<double>& b) {
  return Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
}

Criterion crit_of(const std::string& text, const ModelSpec& model) {
  if (text == "D" || text == "IMSE") return criterion_from_json(Json{{"kind", text}}, model);
  return criterion_from_json(Json::parse(text), model);
}

std::string optimize(const std::string& model_json, const std::vector<double>& beta,
                     const std::string& criterion) {
  const ModelSpec model = model_from_json(Json::parse(model_json));
  return result_to_json(local_opt_design(model, beta_of(beta), crit_of(criterion, model))).dump();
}

std::string check(const std::string& model_json, const std::vector<double>& beta,
                  const std::string& criterion, const std::string& design_json) {
  const ModelSpec model = model_from_json(Json::parse(model_json));
  const Design xi = design_from_json(Json::parse(design_json));
  return certificate_to_json(equivalence_check(model, xi, beta_of(beta), crit_of(criterion, model))).dump();
}

double value(const std::string& model_json, const std::vector<double>& beta, const std::string& criterion,
             const std::string& design_json) {
  const ModelSpec model = model_from_json(Json::parse(model_json));
  return criterion_value(model, design_from_json(Json::parse(design_json)), beta_of(beta),
                         crit_of(criterion, model));
}

std::string transfer(const std::string& model_json, const std::vector<double>& beta,
                     const std::string& criterion, const std::string& design_json,
                     const std::string& transform_json) {
  const ModelSpec model = model_from_json(Json::parse(model_json));
  const Criterion crit = crit_of(criterion, model);
  const TransformPair pair = transform_from_json(Json::parse(transform_json), model);
  const auto t = transfer_optimal(model, design_from_json(Json::parse(design_json)), beta_of(beta), pair, crit);
  const Criterion ct = t.nu ? Criterion::imse(*t.nu) : Criterion::d();
  Json out{{"model", model_to_json(t.model)},
           {"design", design_to_json(t.design)},
           {"beta", vector_to_json(t.beta)},
           {"certificate", certificate_to_json(equivalence_check(t.model, t.design, t.beta, ct))}};
  return out.dump();
}

std::string maximin(int per_decade, bool include_limit, std::optional<double> fixed_w) {
  const ModelSpec model = ModelSpec::first_order(Region::box(Vector::Zero(2), Vector::Ones(2)));
  std::vector<Parameter> grid;
  for (double g : equal_slopes_gamma_grid(per_decade)) grid.push_back(Vector{{1.0, g, g}});
  MaximinOptions mo;
  mo.include_gamma_infinity_limit = include_limit;
  const InvariantFamily fam = equal_slopes_family();
  const MaximinResult r = fixed_w ? evaluate_invariant(model, Criterion::d(), fam, *fixed_w, grid, mo)
                                  : maximin_invariant(model, Criterion::d(), fam, grid, mo);
  Json out{{"w", r.w},
           {"design", design_to_json(r.design)},
           {"min_efficiency", r.min_efficiency},
           {"efficiencies", r.efficiencies},
           {"worst_at_limit", r.worst_at_limit}};
  if (include_limit) out["limit_efficiency"] = r.limit_efficiency;
  return out.dump();
}

std::string reproduce_target(const std::string& target, std::uint64_t seed) {
  const ReproReport rep = reproduce(target, seed);
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected}, {"tol", c.tol},
                      {"passed", c.passed}});
  }
  return Json{{"target", rep.target}, {"passed", rep.passed()}, {"checks", checks}, {"csv", rep.csv},
              {"notes", rep.notes}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Locally optimal designs for gamma regression models";

  static py::exception<DesignError> design_error(m, "DesignError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DesignError& e) {
      py::set_error(design_error, e.what());
    }
  });

  m.def("optimize", &optimize, py::arg("model"), py::arg("beta"), py::arg("criterion"));
  m.def("check", &check, py::arg("model"), py::arg("beta"), py::arg("criterion"), py::arg("design"));
  m.def("criterion_value", &value, py::arg("model"), py::arg("beta"), py::arg("criterion"), py::arg("design"));
  m.def("transfer", &transfer, py::arg("model"), py::arg("beta"), py::arg("criterion"), py::arg("design"),
        py::arg("transform"));
  m.def("maximin", &maximin, py::arg("per_decade"), py::arg("include_limit"), py::arg("fixed_w"));
  m.def("reproduce", &reproduce_target, py::arg("target"), py::arg("seed") = kDefaultSeed);
  m.def("w_star_beta1_zero", &w_star_beta1_zero, py::arg("gamma2"));
  m.def("classify_region", [](double g1, double g2) { return to_string(classify_region(g1, g2)); });
  m.def("equal_slopes_closed_form",
        [](double g) { return design_to_json(equal_slopes_closed_form(g)).dump(); }, py::arg("gamma"));
}
