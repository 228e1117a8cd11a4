#pragma once

#include "optdesign/model.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace optdesign {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kSensitivityTol = 1e-6;

/// Local D- or IMSE-criterion. IMSE carries its weighting measure.
struct Criterion {
  enum class Kind { D, IMSE };

  Kind kind = Kind::D;
  std::optional<WeightingMeasure> nu;
  int quadrature_order = kDefaultQuadratureOrder;

  static Criterion d() { return {}; }
  static Criterion imse(WeightingMeasure measure, int order = kDefaultQuadratureOrder) {
    return {Kind::IMSE, std::move(measure), order};
  }
  bool is_d() const noexcept { return kind == Kind::D; }
  const WeightingMeasure& measure() const;
};

/// Smallest eigenvalue above 1e-12 * trace.
bool is_positive_definite(const Matrix& m);

/// det(M^{-1}); +inf for singular M.
double d_value(const Matrix& m);
/// det(M)^{-1/p}; +inf for singular M.
double d_homogeneous(const Matrix& m, int p);
/// trace(V M^{-1}); +inf for singular M.
double imse_value(const Matrix& v, const Matrix& m);
double imse_value(const ModelSpec& model, const Design& xi, const Parameter& beta,
                  const WeightingMeasure& nu, int quadrature_order = kDefaultQuadratureOrder);

/// Criterion value to be minimized: d_value for D, imse_value for IMSE.
double criterion_value(const ModelSpec& model, const Design& xi, const Parameter& beta,
                       const Criterion& crit);
/// Homogeneous local criterion used for efficiencies: det^{-1/p} for D, IMSE as is.
double homogeneous_value(const ModelSpec& model, const Design& xi, const Parameter& beta,
                         const Criterion& crit);

/// Sensitivity function of a design, precomputed for repeated evaluation.
/// D: lambda(f^T beta) f^T M^{-1} f with bound p.
/// IMSE: lambda(f^T beta) f^T M^{-1} V M^{-1} f with bound trace(V M^{-1}).
/// Construction throws SingularInformation when M is not positive definite.
class SensitivityFunction {
 public:
  SensitivityFunction(const ModelSpec& model, const Design& xi, const Parameter& beta,
                      const Criterion& crit);

  double operator()(const Point& x) const;
  double bound() const noexcept { return bound_; }
  const Matrix& information() const noexcept { return m_; }

 private:
  const ModelSpec* model_;
  Parameter beta_;
  Matrix m_;
  Matrix kernel_;
  double bound_ = 0.0;
};

double d_sensitivity(const ModelSpec& model, const Design& xi, const Parameter& beta,
                     const Point& x);
double imse_sensitivity(const ModelSpec& model, const Design& xi, const Parameter& beta,
                        const WeightingMeasure& nu, const Point& x,
                        int quadrature_order = kDefaultQuadratureOrder);

/// Result of an equivalence-theorem check over a finite set of points.
struct Certificate {
  double max_sensitivity = 0.0;
  double bound = 0.0;
  Point argmax;
  bool passed = false;
  std::size_t points_checked = 0;
};

/// Region extremal points plus a uniform grid (101 per axis, at most 10 201 points).
std::vector<Point> equivalence_points(const Region& region);

/// Passes iff sup sensitivity <= bound * (1 + rel_tol) on `points`.
Certificate equivalence_check(const ModelSpec& model, const Design& xi, const Parameter& beta,
                              const Criterion& crit, const std::vector<Point>& points,
                              double rel_tol = kSensitivityTol);
Certificate equivalence_check(const ModelSpec& model, const Design& xi, const Parameter& beta,
                              const Criterion& crit, double rel_tol = kSensitivityTol);

struct EfficiencyReport {
  double value = 0.0;
  Criterion criterion;
  Parameter beta;
  Design reference;
  bool singular = false;
};

/// Phi_beta(xi_opt) / Phi_beta(xi) with the homogeneous D version; 0 for singular xi.
EfficiencyReport efficiency(const ModelSpec& model, const Design& xi, const Parameter& beta,
                            const Criterion& crit, const Design& xi_opt);

/// sup over the parameter set of Phi_beta(xi) / Phi_beta(xi*_beta), i.e. the
/// reciprocal of the minimal efficiency. +inf when xi is singular.
double maximin_objective(const ModelSpec& model, const Design& xi, const Criterion& crit,
                         const std::vector<Parameter>& params,
                         const std::vector<Design>& local_optima);

}  // namespace optdesign
