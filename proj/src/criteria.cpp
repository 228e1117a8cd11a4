#include "optdesign/criteria.hpp"

#include "optdesign/error.hpp"

#include <algorithm>
#include <cmath>

namespace optdesign {

const WeightingMeasure& Criterion::measure() const {
  if (!nu) throw DesignError(ErrorKind::InvalidInput, "IMSE criterion without weighting measure");
  return *nu;
}

bool is_positive_definite(const Matrix& m) {
  const double tr = m.trace();
  if (!(tr > 0.0) || !std::isfinite(tr)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() > 1e-12 * tr;
}

double d_value(const Matrix& m) {
  if (!is_positive_definite(m)) return kInfinity;
  return 1.0 / m.determinant();
}

double d_homogeneous(const Matrix& m, int p) {
  if (!is_positive_definite(m)) return kInfinity;
  return std::pow(m.determinant(), -1.0 / p);
}

double imse_value(const Matrix& v, const Matrix& m) {
  if (!is_positive_definite(m)) return kInfinity;
  return m.llt().solve(v).trace();
}

double imse_value(const ModelSpec& model, const Design& xi, const Parameter& beta,
                  const WeightingMeasure& nu, int quadrature_order) {
  return imse_value(weight_matrix_v(model, beta, nu, quadrature_order), design_info(model, xi, beta));
}

double criterion_value(const ModelSpec& model, const Design& xi, const Parameter& beta,
                       const Criterion& crit) {
  if (crit.is_d()) return d_value(design_info(model, xi, beta));
  return imse_value(model, xi, beta, crit.measure(), crit.quadrature_order);
}

double homogeneous_value(const ModelSpec& model, const Design& xi, const Parameter& beta,
                         const Criterion& crit) {
  if (crit.is_d()) return d_homogeneous(design_info(model, xi, beta), model.p());
  return imse_value(model, xi, beta, crit.measure(), crit.quadrature_order);
}

SensitivityFunction::SensitivityFunction(const ModelSpec& model, const Design& xi,
                                         const Parameter& beta, const Criterion& crit)
    : model_(&model), beta_(beta), m_(design_info(model, xi, beta)) {
  if (!is_positive_definite(m_)) {
    throw DesignError(ErrorKind::SingularInformation, "information matrix is singular");
  }
  const Matrix m_inv = m_.llt().solve(Matrix::Identity(m_.rows(), m_.cols()));
  if (crit.is_d()) {
    kernel_ = m_inv;
    bound_ = static_cast<double>(model.p());
  } else {
    const Matrix v = weight_matrix_v(model, beta, crit.measure(), crit.quadrature_order);
    kernel_ = m_inv * v * m_inv;
    bound_ = (v * m_inv).trace();
  }
  kernel_ = 0.5 * (kernel_ + kernel_.transpose());
}

double SensitivityFunction::operator()(const Point& x) const {
  const Vector f = model_->basis(x);
  return intensity(*model_, f.dot(beta_)) * f.dot(kernel_ * f);
}

double d_sensitivity(const ModelSpec& model, const Design& xi, const Parameter& beta,
                     const Point& x) {
  return SensitivityFunction(model, xi, beta, Criterion::d())(x);
}

double imse_sensitivity(const ModelSpec& model, const Design& xi, const Parameter& beta,
                        const WeightingMeasure& nu, const Point& x, int quadrature_order) {
  return SensitivityFunction(model, xi, beta, Criterion::imse(nu, quadrature_order))(x);
}

std::vector<Point> equivalence_points(const Region& region) {
  std::vector<Point> pts = region.extremal_points();
  if (!region.is_box()) return pts;
  int per_axis = 101;
  while (per_axis > 2 && std::pow(static_cast<double>(per_axis), region.dim()) > 10201.0) --per_axis;
  auto grid = region.grid(per_axis);
  pts.insert(pts.end(), grid.begin(), grid.end());
  return pts;
}

Certificate equivalence_check(const ModelSpec& model, const Design& xi, const Parameter& beta,
                              const Criterion& crit, const std::vector<Point>& points,
                              double rel_tol) {
  const SensitivityFunction psi(model, xi, beta, crit);
  Certificate cert;
  cert.bound = psi.bound();
  cert.max_sensitivity = -kInfinity;
  // fixed ordering, first maximizer wins
  for (const auto& x : points) {
    const double s = psi(x);
    if (s > cert.max_sensitivity) {
      cert.max_sensitivity = s;
      cert.argmax = x;
    }
  }
  cert.points_checked = points.size();
  cert.passed = cert.max_sensitivity <= cert.bound * (1.0 + rel_tol);
  return cert;
}

Certificate equivalence_check(const ModelSpec& model, const Design& xi, const Parameter& beta,
                              const Criterion& crit, double rel_tol) {
  return equivalence_check(model, xi, beta, crit, equivalence_points(model.region()), rel_tol);
}

EfficiencyReport efficiency(const ModelSpec& model, const Design& xi, const Parameter& beta,
                            const Criterion& crit, const Design& xi_opt) {
  EfficiencyReport report{0.0, crit, beta, xi_opt, false};
  const double phi = homogeneous_value(model, xi, beta, crit);
  const double phi_opt = homogeneous_value(model, xi_opt, beta, crit);
  if (!std::isfinite(phi_opt)) {
    throw DesignError(ErrorKind::SingularInformation, "reference design is singular");
  }
  if (!std::isfinite(phi)) {
    report.singular = true;
    return report;
  }
  report.value = phi_opt / phi;
  return report;
}

double maximin_objective(const ModelSpec& model, const Design& xi, const Criterion& crit,
                         const std::vector<Parameter>& params,
                         const std::vector<Design>& local_optima) {
  if (params.empty()) throw DesignError(ErrorKind::EmptyGrid, "parameter set is empty");
  if (params.size() != local_optima.size()) {
    throw DesignError(ErrorKind::InvalidInput, "one local optimum per parameter is required");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double phi = homogeneous_value(model, xi, params[i], crit);
    if (!std::isfinite(phi)) return kInfinity;
    const double phi_opt = homogeneous_value(model, local_optima[i], params[i], crit);
    worst = std::max(worst, phi / phi_opt);
  }
  return worst;
}

}  // namespace optdesign
