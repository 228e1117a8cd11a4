#include "optdesign/model.hpp"

#include "optdesign/error.hpp"
#include "optdesign/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace optdesign {

namespace {

std::string format_point(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

void check_weights(const std::vector<double>& weights, const char* what) {
  if (weights.empty()) throw DesignError(ErrorKind::InvalidInput, std::string(what) + " is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw DesignError(ErrorKind::InvalidInput, std::string(what) + " weights must be positive", i);
    }
    sum += weights[i];
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os << what << " weights sum to " << sum << ", expected 1";
    throw DesignError(ErrorKind::WeightSumViolation, os.str());
  }
}

// Deterministic interior sample used for rank and positivity checks.
std::vector<Point> sample_region(const Region& region, std::size_t count, unsigned seed) {
  if (!region.is_box()) return region.candidates();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Point x(region.dim());
    for (int d = 0; d < region.dim(); ++d) {
      x[d] = region.lower()[d] + unit(rng) * (region.upper()[d] - region.lower()[d]);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Region

Region Region::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw DesignError(ErrorKind::InvalidInput, "region bounds must be nonempty and of equal length");
  }
  for (Eigen::Index d = 0; d < lower.size(); ++d) {
    if (!(upper[d] > lower[d])) {
      throw DesignError(ErrorKind::InvalidInput, "region upper bound must exceed lower bound");
    }
  }
  Region r;
  r.lower_ = std::move(lower);
  r.upper_ = std::move(upper);
  return r;
}

Region Region::finite(std::vector<Point> points) {
  if (points.empty()) throw DesignError(ErrorKind::InvalidInput, "candidate list is empty");
  const auto dim = points.front().size();
  Region r;
  r.lower_ = points.front();
  r.upper_ = points.front();
  for (const auto& x : points) {
    if (x.size() != dim) throw DesignError(ErrorKind::InvalidInput, "candidate dimensions differ");
    r.lower_ = r.lower_.cwiseMin(x);
    r.upper_ = r.upper_.cwiseMax(x);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (same_point(points[i], points[j])) {
        throw DesignError(ErrorKind::InvalidInput, "duplicate candidate point", i);
      }
    }
  }
  r.candidates_ = std::move(points);
  return r;
}

std::vector<Point> Region::extremal_points() const {
  if (!is_box()) return candidates_;
  const int d = dim();
  std::vector<Point> out;
  out.reserve(std::size_t{1} << d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    Point x(d);
    // most significant bit on coordinate 0 gives lexicographic order
    for (int k = 0; k < d; ++k) {
      const bool hi = (mask >> (d - 1 - k)) & 1U;
      x[k] = hi ? upper_[k] : lower_[k];
    }
    out.push_back(std::move(x));
  }
  return out;
}

bool Region::contains(const Point& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  if (!is_box()) {
    return std::any_of(candidates_.begin(), candidates_.end(),
                       [&](const Point& c) { return same_point(c, x); });
  }
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    if (x[d] < lower_[d] - tol || x[d] > upper_[d] + tol) return false;
  }
  return true;
}

std::vector<Point> Region::grid(int points_per_axis) const {
  if (!is_box()) return candidates_;
  const int d = dim();
  const int n = std::max(points_per_axis, 2);
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(n);
  std::vector<Point> out;
  out.reserve(total);
  std::vector<int> idx(d, 0);
  for (std::size_t m = 0; m < total; ++m) {
    Point x(d);
    for (int k = 0; k < d; ++k) {
      x[k] = lower_[k] + (upper_[k] - lower_[k]) * idx[k] / (n - 1.0);
    }
    out.push_back(std::move(x));
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
  return out;
}

bool same_point(const Point& a, const Point& b, double tol) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

// ------------------------------------------------------------- Intensity

Intensity Intensity::gamma_inverse_link(double kappa) {
  if (!(kappa > 0.0)) throw DesignError(ErrorKind::InvalidInput, "kappa must be positive");
  Intensity out;
  out.kappa_ = kappa;
  return out;
}

Intensity Intensity::custom(Function lambda) {
  if (!lambda) throw DesignError(ErrorKind::InvalidInput, "custom intensity is empty");
  Intensity out;
  out.custom_ = std::move(lambda);
  return out;
}

double Intensity::operator()(double z) const {
  if (custom_) return custom_(z);
  if (!(z > 0.0)) {
    std::ostringstream os;
    os << "linear component " << z << " is not positive";
    throw DesignError(ErrorKind::NonpositiveLinearComponent, os.str());
  }
  return kappa_ / (z * z);
}

// ------------------------------------------------------------- ModelSpec

ModelSpec ModelSpec::first_order(Region region, double kappa) {
  ModelSpec m;
  m.p_ = region.dim() + 1;
  m.region_ = std::move(region);
  m.basis_ = [](const Point& x) {
    Vector f(x.size() + 1);
    f[0] = 1.0;
    f.tail(x.size()) = x;
    return f;
  };
  m.intensity_ = Intensity::gamma_inverse_link(kappa);
  m.affine_ = true;
  m.intercept_ = true;
  m.builtin_ = true;
  m.validate();
  return m;
}

ModelSpec ModelSpec::custom(Region region, int p, Basis basis, Intensity intensity, bool affine,
                            bool has_intercept) {
  if (p < 2) throw DesignError(ErrorKind::InvalidInput, "basis length p must be >= 2");
  if (!basis) throw DesignError(ErrorKind::InvalidInput, "basis function is empty");
  ModelSpec m;
  m.region_ = std::move(region);
  m.p_ = p;
  m.basis_ = std::move(basis);
  m.intensity_ = std::move(intensity);
  m.affine_ = affine;
  m.intercept_ = has_intercept;
  m.validate();
  return m;
}

ModelSpec ModelSpec::with_region(Region region) const {
  if (region.dim() != dim_x()) {
    throw DesignError(ErrorKind::InvalidInput, "region dimension differs from the model's");
  }
  ModelSpec m = *this;
  m.region_ = std::move(region);
  m.validate();
  return m;
}

ModelSpec ModelSpec::with_kappa(double kappa) const {
  if (!intensity_.is_gamma()) {
    throw DesignError(ErrorKind::InvalidInput, "kappa applies to the gamma intensity only");
  }
  ModelSpec m = *this;
  m.intensity_ = Intensity::gamma_inverse_link(kappa);
  return m;
}

void ModelSpec::validate() const {
  const auto sample_count = static_cast<std::size_t>(p_ + (p_ + 1) / 2);
  std::vector<Point> pts = region_.extremal_points();
  if (region_.is_box() && pts.size() < sample_count) {
    auto extra = sample_region(region_, sample_count - pts.size(), 7U);
    pts.insert(pts.end(), extra.begin(), extra.end());
  }
  Matrix gram = Matrix::Zero(p_, p_);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vector f = basis_(pts[i]);
    if (f.size() != p_) {
      throw DesignError(ErrorKind::InvalidInput, "basis output length differs from p", i);
    }
    gram.noalias() += f * f.transpose();
  }
  Eigen::FullPivLU<Matrix> lu(gram);
  lu.setThreshold(1e-10);
  if (lu.rank() < p_) {
    throw DesignError(ErrorKind::InvalidInput,
                      "basis functions are linearly dependent on the region");
  }
  if (intercept_) {
    for (const auto& x : pts) {
      if (std::abs(basis_(x)[0] - 1.0) > 1e-12) {
        throw DesignError(ErrorKind::InvalidInput, "basis component 0 is not constant 1");
      }
    }
  }
}

// ---------------------------------------------------------------- Design

Design::Design(std::vector<Point> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.size() != weights_.size()) {
    throw DesignError(ErrorKind::InvalidInput, "support and weights differ in length");
  }
  check_weights(weights_, "design");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i].size() != support_.front().size()) {
      throw DesignError(ErrorKind::InvalidInput, "support point dimensions differ", i);
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (same_point(support_[i], support_[j])) {
        throw DesignError(ErrorKind::InvalidInput,
                          "support points " + format_point(support_[i]) + " coincide", i);
      }
    }
  }
}

Design Design::merged(const std::vector<Point>& support, const std::vector<double>& weights,
                      double tol) {
  if (support.size() != weights.size()) {
    throw DesignError(ErrorKind::InvalidInput, "support and weights differ in length");
  }
  std::vector<Point> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    auto it = std::find_if(pts.begin(), pts.end(),
                           [&](const Point& q) { return same_point(q, support[i], tol); });
    if (it == pts.end()) {
      pts.push_back(support[i]);
      w.push_back(weights[i]);
    } else {
      w[static_cast<std::size_t>(it - pts.begin())] += weights[i];
    }
  }
  if (pts.empty()) throw DesignError(ErrorKind::InvalidInput, "design has no positive weight");
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= total;
  return Design(std::move(pts), std::move(w));
}

double Design::weight_at(const Point& x, double tol) const {
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (same_point(support_[i], x, tol)) return weights_[i];
  }
  return 0.0;
}

Design Design::sorted() const {
  std::vector<std::size_t> order(support_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = support_[a];
    const auto& pb = support_[b];
    return std::lexicographical_compare(pa.data(), pa.data() + pa.size(), pb.data(),
                                        pb.data() + pb.size());
  });
  Design out;
  for (auto i : order) {
    out.support_.push_back(support_[i]);
    out.weights_.push_back(weights_[i]);
  }
  return out;
}

// ------------------------------------------------------ WeightingMeasure

WeightingMeasure WeightingMeasure::discrete(std::vector<Point> points, std::vector<double> weights) {
  if (points.size() != weights.size()) {
    throw DesignError(ErrorKind::InvalidInput, "measure points and weights differ in length");
  }
  check_weights(weights, "measure");
  WeightingMeasure nu;
  nu.kind_ = Kind::Discrete;
  nu.points_ = std::move(points);
  nu.weights_ = std::move(weights);
  return nu;
}

WeightingMeasure WeightingMeasure::uniform(Vector lower, Vector upper) {
  const Region check = Region::box(lower, upper);  // validates bounds
  (void)check;
  WeightingMeasure nu;
  nu.kind_ = Kind::Uniform;
  nu.lower_ = std::move(lower);
  nu.upper_ = std::move(upper);
  return nu;
}

WeightingMeasure WeightingMeasure::uniform_over(const Region& region) {
  if (!region.is_box()) {
    throw DesignError(ErrorKind::InvalidInput,
                      "a continuous uniform measure needs a hyperrectangular region");
  }
  return uniform(region.lower(), region.upper());
}

// ------------------------------------------------------------ operations

Vector eval_basis(const ModelSpec& model, const Point& x) {
  if (x.size() != model.dim_x()) {
    throw DesignError(ErrorKind::InvalidInput, "covariate dimension differs from the model's");
  }
  if (!model.region().contains(x)) {
    throw DesignError(ErrorKind::OutOfRegion, "point " + format_point(x) + " is outside the region");
  }
  return model.basis(x);
}

double intensity(const ModelSpec& model, double z) { return model.intensity()(z); }

Matrix elemental_info(const ModelSpec& model, const Point& x, const Parameter& beta) {
  if (beta.size() != model.p()) {
    throw DesignError(ErrorKind::InvalidInput, "parameter length differs from p");
  }
  const Vector f = eval_basis(model, x);
  const double lambda = intensity(model, f.dot(beta));
  return lambda * f * f.transpose();
}

Matrix design_info(const ModelSpec& model, const Design& xi, const Parameter& beta) {
  if (beta.size() != model.p()) {
    throw DesignError(ErrorKind::InvalidInput, "parameter length differs from p");
  }
  Matrix m = Matrix::Zero(model.p(), model.p());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    try {
      m.noalias() += xi.weight(i) * elemental_info(model, xi.point(i), beta);
    } catch (const DesignError& e) {
      throw DesignError(e.kind(), std::string("support point ") + std::to_string(i) + ": " + e.what(),
                        i);
    }
  }
  return 0.5 * (m + m.transpose());
}

namespace {

// sum_i w_i lambda(f_i' beta)^2 f_i f_i' over the nodes
Matrix v_on_nodes(const ModelSpec& model, const Parameter& beta, const std::vector<Point>& nodes,
                  const std::vector<double>& weights) {
  Matrix v = Matrix::Zero(model.p(), model.p());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].size() != model.dim_x()) {
      throw DesignError(ErrorKind::InvalidInput, "measure dimension differs from the model's", i);
    }
    const Vector f = model.basis(nodes[i]);
    double lambda = 0.0;
    try {
      lambda = intensity(model, f.dot(beta));
    } catch (const DesignError& e) {
      throw DesignError(e.kind(), std::string("measure node ") + std::to_string(i) + ": " + e.what(), i);
    }
    v.noalias() += weights[i] * lambda * lambda * f * f.transpose();
  }
  return v;
}

struct BoxV {
  const ModelSpec& model;
  const Parameter& beta;
  int order;
  double volume;  // of the whole measure box

  Matrix rule(const Vector& lo, const Vector& hi) const {
    const TensorRule r = tensor_gauss_legendre(lo, hi, order);
    return (hi - lo).prod() / volume * v_on_nodes(model, beta, r.nodes, r.weights);
  }

  // Halve every coordinate until the children agree with their parent.
  Matrix refine(const Vector& lo, const Vector& hi, const Matrix& estimate, double tol, int depth) const {
    const auto dim = lo.size();
    std::vector<std::pair<Vector, Vector>> boxes;
    std::vector<Matrix> parts;
    Matrix sum = Matrix::Zero(estimate.rows(), estimate.cols());
    for (long mask = 0; mask < (1L << dim); ++mask) {
      Vector a = lo, b = hi;
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double mid = 0.5 * (lo[k] + hi[k]);
        ((mask >> k) & 1 ? a[k] : b[k]) = mid;
      }
      parts.push_back(rule(a, b));
      sum += parts.back();
      boxes.emplace_back(std::move(a), std::move(b));
    }
    const int max_depth = dim == 1 ? 16 : dim == 2 ? 8 : 3;
    if (depth >= max_depth || (sum - estimate).cwiseAbs().maxCoeff() <= tol) return sum;
    Matrix out = Matrix::Zero(estimate.rows(), estimate.cols());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      out += refine(boxes[i].first, boxes[i].second, parts[i], tol, depth + 1);
    }
    return out;
  }
};

}  // namespace

Matrix weight_matrix_v(const ModelSpec& model, const Parameter& beta, const WeightingMeasure& nu,
                       int quadrature_order) {
  if (beta.size() != model.p()) {
    throw DesignError(ErrorKind::InvalidInput, "parameter length differs from p");
  }
  Matrix v;
  if (nu.is_uniform()) {
    if (nu.lower().size() != model.dim_x()) {
      throw DesignError(ErrorKind::InvalidInput, "measure dimension differs from the model's");
    }
    // composite Gauss-Legendre, refined only where the integrand is steep
    const BoxV box{model, beta, quadrature_order, (nu.upper() - nu.lower()).prod()};
    const Matrix single = box.rule(nu.lower(), nu.upper());
    v = box.refine(nu.lower(), nu.upper(), single, 1e-13 * single.cwiseAbs().maxCoeff(), 0);
  } else {
    v = v_on_nodes(model, beta, nu.points(), nu.weights());
  }
  return 0.5 * (v + v.transpose());
}

void validate_design(const ModelSpec& model, const Design& xi) {
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (xi.point(i).size() != model.dim_x() || !model.region().contains(xi.point(i))) {
      throw DesignError(ErrorKind::OutOfRegion,
                        "support point " + format_point(xi.point(i)) + " is outside the region", i);
    }
  }
}

void validate_measure(const ModelSpec& model, const WeightingMeasure& nu) {
  if (nu.is_uniform()) {
    if (nu.lower().size() != model.dim_x()) {
      throw DesignError(ErrorKind::InvalidInput, "measure dimension differs from the model's");
    }
    if (!model.region().is_box() || !model.region().contains(nu.lower()) ||
        !model.region().contains(nu.upper())) {
      throw DesignError(ErrorKind::OutOfRegion, "uniform measure support is not inside the region");
    }
    return;
  }
  for (std::size_t i = 0; i < nu.points().size(); ++i) {
    if (!model.region().contains(nu.points()[i])) {
      throw DesignError(ErrorKind::OutOfRegion,
                        "measure atom " + format_point(nu.points()[i]) + " is outside the region", i);
    }
  }
}

std::vector<Point> positivity_points(const ModelSpec& model) {
  const Region& region = model.region();
  if (!region.is_box() || model.affine_basis()) return region.extremal_points();
  // 16 per axis, capped at 65 536 points
  int per_axis = 16;
  while (per_axis > 2 && std::pow(static_cast<double>(per_axis), region.dim()) > 65536.0) --per_axis;
  auto pts = region.grid(per_axis);
  auto ext = region.extremal_points();
  pts.insert(pts.end(), ext.begin(), ext.end());
  return pts;
}

bool is_admissible(const ModelSpec& model, const Parameter& beta) {
  if (beta.size() != model.p()) return false;
  if (!model.intensity().is_gamma()) return true;
  for (const auto& x : positivity_points(model)) {
    if (!(model.basis(x).dot(beta) > 0.0)) return false;
  }
  return true;
}

void check_parameter(const ModelSpec& model, const Parameter& beta) {
  if (beta.size() != model.p()) {
    throw DesignError(ErrorKind::InvalidInput, "parameter length differs from p");
  }
  if (!model.intensity().is_gamma()) return;
  const auto pts = positivity_points(model);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double z = model.basis(pts[i]).dot(beta);
    if (!(z > 0.0)) {
      std::ostringstream os;
      os << "f(x)^T beta = " << z << " at x = " << format_point(pts[i]);
      throw DesignError(ErrorKind::NonpositiveLinearComponent, os.str(), i);
    }
  }
}

}  // namespace optdesign
