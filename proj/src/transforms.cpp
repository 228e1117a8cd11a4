#include "optdesign/transforms.hpp"

#include "optdesign/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace optdesign {

namespace {

constexpr double kEquivarianceTol = 1e-9;

std::vector<Point> interior_sample(const Region& region, std::size_t count, unsigned seed) {
  if (!region.is_box()) return region.candidates();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  for (std::size_t n = 0; n < count; ++n) {
    Point x(region.dim());
    for (int d = 0; d < region.dim(); ++d) {
      x[d] = region.lower()[d] + unit(rng) * (region.upper()[d] - region.lower()[d]);
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size() && tok.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(tok);
      }
    } catch (const std::exception&) {
      throw DesignError(ErrorKind::InvalidInput, "cannot parse number '" + tok + "'");
    }
  }
  return out;
}

int coordinate(double value, int dim) {
  const auto k = static_cast<int>(std::lround(value));
  if (k < 1 || k > dim || std::abs(value - k) > 0) {
    throw DesignError(ErrorKind::InvalidInput, "coordinate index out of range");
  }
  return k - 1;
}

}  // namespace

// -------------------------------------------------------- AffinePointMap

AffinePointMap::AffinePointMap(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size() || b_.size() == 0) {
    throw DesignError(ErrorKind::InvalidInput, "affine map needs a square A matching b");
  }
  if (!(std::abs(a_.determinant()) > 1e-12)) {
    throw DesignError(ErrorKind::InvalidInput, "affine map matrix is singular");
  }
}

AffinePointMap AffinePointMap::identity(int dim) {
  return {Matrix::Identity(dim, dim), Vector::Zero(dim)};
}

AffinePointMap AffinePointMap::inverse() const {
  const Matrix a_inv = a_.inverse();
  return {a_inv, -a_inv * b_};
}

AffinePointMap AffinePointMap::after(const AffinePointMap& first) const {
  return {a_ * first.a_, a_ * first.b_ + b_};
}

bool AffinePointMap::axis_aligned() const {
  const double scale = a_.cwiseAbs().maxCoeff();
  for (Eigen::Index r = 0; r < a_.rows(); ++r) {
    int row_nz = 0;
    int col_nz = 0;
    for (Eigen::Index c = 0; c < a_.cols(); ++c) {
      row_nz += std::abs(a_(r, c)) > 1e-14 * scale;
      col_nz += std::abs(a_(c, r)) > 1e-14 * scale;
    }
    if (row_nz != 1 || col_nz != 1) return false;
  }
  return true;
}

// ---------------------------------------------------------- TransformPair

TransformPair::TransformPair(AffinePointMap g, Matrix q, ParamMode mode)
    : g_(std::move(g)), q_(std::move(q)), mode_(mode) {
  if (q_.rows() != q_.cols() || !(std::abs(q_.determinant()) > 1e-12)) {
    throw DesignError(ErrorKind::InvalidInput, "Q must be square and nonsingular");
  }
}

Matrix derive_q(const ModelSpec& model, const AffinePointMap& g) {
  if (g.dim() != model.dim_x()) {
    throw DesignError(ErrorKind::InvalidInput, "point map dimension differs from the model's");
  }
  const int p = model.p();
  std::vector<Point> pool = model.region().extremal_points();
  if (model.region().is_box()) {
    auto grid = model.region().grid(5);
    pool.insert(pool.end(), grid.begin(), grid.end());
  }

  // greedy max-volume selection by Gram-Schmidt on basis vectors
  Matrix f_sel(p, p);
  Matrix fg_sel(p, p);
  std::vector<Vector> ortho;
  std::vector<bool> used(pool.size(), false);
  for (int k = 0; k < p; ++k) {
    double best = 0.0;
    std::size_t best_i = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      Vector r = model.basis(pool[i]);
      for (const auto& e : ortho) r -= e.dot(r) * e;
      if (r.norm() > best) {
        best = r.norm();
        best_i = i;
      }
    }
    if (best_i == pool.size() || best < 1e-10) {
      throw DesignError(ErrorKind::DegenerateSample, "no nonsingular basis sample found");
    }
    used[best_i] = true;
    Vector r = model.basis(pool[best_i]);
    for (const auto& e : ortho) r -= e.dot(r) * e;
    ortho.push_back(r / r.norm());
    f_sel.col(k) = model.basis(pool[best_i]);
    fg_sel.col(k) = model.basis(g(pool[best_i]));
  }
  const Matrix q = f_sel.transpose().partialPivLu().solve(fg_sel.transpose()).transpose();

  auto check = interior_sample(model.region(), 50, 11U);
  const auto ext = model.region().extremal_points();
  check.insert(check.end(), ext.begin(), ext.end());
  double residual = 0.0;
  for (const auto& x : check) {
    residual = std::max(residual, (model.basis(g(x)) - q * model.basis(x)).norm());
  }
  if (!(residual < kEquivarianceTol)) {
    std::ostringstream os;
    os << "basis is not linearly equivariant under g (residual " << residual << ")";
    throw DesignError(ErrorKind::NotEquivariant, os.str());
  }
  return q;
}

TransformPair make_pair(const ModelSpec& model, const AffinePointMap& g, ParamMode mode) {
  if (mode == ParamMode::InterceptRescaled && !model.has_intercept()) {
    throw DesignError(ErrorKind::InvalidInput, "rescaled parameter map needs an intercept");
  }
  return {g, derive_q(model, g), mode};
}

double equivariance_residual(const ModelSpec& model, const TransformPair& pair) {
  auto check = interior_sample(model.region(), 50, 13U);
  const auto ext = model.region().extremal_points();
  check.insert(check.end(), ext.begin(), ext.end());
  double residual = 0.0;
  for (const auto& x : check) {
    residual = std::max(residual, (model.basis(pair.g()(x)) - pair.q() * model.basis(x)).norm());
  }
  return residual;
}

double rescale_factor(const TransformPair& pair, const Parameter& beta) {
  if (pair.mode() == ParamMode::Linear) return 1.0;
  const Vector lin = pair.q().transpose().partialPivLu().solve(beta);
  const double c = beta[0] / lin[0];
  if (!(lin[0] > 0.0) || !(c > 0.0) || !std::isfinite(c)) {
    throw DesignError(ErrorKind::RescaleUndefined,
                      "intercept of Q^{-T} beta must be positive with the same sign as beta_0");
  }
  return c;
}

Parameter param_transform(const TransformPair& pair, const Parameter& beta) {
  if (beta.size() != pair.q().rows()) {
    throw DesignError(ErrorKind::InvalidInput, "parameter length differs from Q");
  }
  const Vector lin = pair.q().transpose().partialPivLu().solve(beta);
  if (pair.mode() == ParamMode::Linear) return lin;
  Parameter out = rescale_factor(pair, beta) * lin;
  out[0] = beta[0];
  return out;
}

TransformPair inverse_pair(const TransformPair& pair) {
  return {pair.g().inverse(), pair.q().inverse(), pair.mode()};
}

TransformPair compose(const TransformPair& first, const TransformPair& second) {
  if (first.mode() != second.mode()) {
    throw DesignError(ErrorKind::InvalidInput, "cannot compose pairs with different parameter modes");
  }
  return {second.g().after(first.g()), second.q() * first.q(), first.mode()};
}

Region image_region(const Region& region, const AffinePointMap& g) {
  if (!region.is_box()) {
    std::vector<Point> pts;
    for (const auto& x : region.candidates()) pts.push_back(g(x));
    return Region::finite(std::move(pts));
  }
  if (!g.axis_aligned()) {
    throw DesignError(ErrorKind::NonAxisAlignedImage, "image of the box is not a box");
  }
  const Point a = g(region.lower());
  const Point b = g(region.upper());
  return Region::box(a.cwiseMin(b), a.cwiseMax(b));
}

ModelSpec image_model(const ModelSpec& model, const AffinePointMap& g) {
  return model.with_region(image_region(model.region(), g));
}

Design design_image(const Design& xi, const TransformPair& pair) {
  std::vector<Point> pts;
  pts.reserve(xi.size());
  for (const auto& x : xi.support()) pts.push_back(pair.g()(x));
  return Design::merged(pts, xi.weights());
}

Design design_image(const Design& xi, const TransformPair& pair, const ModelSpec& target) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    if (!target.region().contains(pair.g()(xi.point(i)))) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "image points outside the target region at support indices";
    for (auto i : bad) os << ' ' << i;
    throw DesignError(ErrorKind::OutOfRegion, os.str(), bad.front());
  }
  return design_image(xi, pair);
}

WeightingMeasure measure_image(const WeightingMeasure& nu, const AffinePointMap& g) {
  if (nu.is_uniform()) {
    if (!g.axis_aligned()) {
      throw DesignError(ErrorKind::NonAxisAlignedImage,
                        "uniform measure pushed through a non-coordinatewise map");
    }
    const Point a = g(nu.lower());
    const Point b = g(nu.upper());
    return WeightingMeasure::uniform(a.cwiseMin(b), a.cwiseMax(b));
  }
  std::vector<Point> pts;
  for (const auto& x : nu.points()) pts.push_back(g(x));
  return WeightingMeasure::discrete(std::move(pts), nu.weights());
}

double verify_info_equivariance(const ModelSpec& model, const Design& xi, const Parameter& beta,
                                const TransformPair& pair) {
  const Matrix m = design_info(model, xi, beta);
  const Parameter beta_t = param_transform(pair, beta);
  const double c = rescale_factor(pair, beta);
  // image information computed directly: the image region need not be a box
  Matrix m_img = Matrix::Zero(model.p(), model.p());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const Vector f = model.basis(pair.g()(xi.point(i)));
    m_img.noalias() += xi.weight(i) * intensity(model, f.dot(beta_t)) * f * f.transpose();
  }
  const Matrix expected = (pair.q() * m * pair.q().transpose()) / (c * c);
  const double scale = std::max(expected.cwiseAbs().maxCoeff(), m_img.cwiseAbs().maxCoeff());
  return (m_img - expected).cwiseAbs().maxCoeff() / scale;
}

TransferredDesign transfer_optimal(const ModelSpec& model, const Design& xi_opt,
                                   const Parameter& beta, const TransformPair& pair,
                                   const Criterion& crit) {
  ModelSpec target = image_model(model, pair.g());
  Design image = design_image(xi_opt, pair, target);
  Parameter beta_t = param_transform(pair, beta);
  std::optional<WeightingMeasure> nu;
  if (!crit.is_d()) nu = measure_image(crit.measure(), pair.g());
  return {std::move(target), std::move(image), std::move(beta_t), std::move(nu)};
}

AffinePointMap named_map(const std::string& name, const Region& region) {
  const int dim = region.dim();
  const auto colon = name.find(':');
  const std::string kind = name.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : name.substr(colon + 1);
  if (kind == "identity" || kind == "id") return AffinePointMap::identity(dim);
  if (kind == "reflect") {
    Matrix a = Matrix::Identity(dim, dim);
    Vector b = Vector::Zero(dim);
    for (double v : split_numbers(args)) {
      const int k = coordinate(v, dim);
      a(k, k) = -1.0;
      b[k] = region.lower()[k] + region.upper()[k];
    }
    return {a, b};
  }
  if (kind == "swap") {
    const auto idx = split_numbers(args);
    if (idx.size() != 2) throw DesignError(ErrorKind::InvalidInput, "swap needs two coordinates");
    const int i = coordinate(idx[0], dim);
    const int j = coordinate(idx[1], dim);
    Matrix a = Matrix::Identity(dim, dim);
    a.row(i).swap(a.row(j));
    return {a, Vector::Zero(dim)};
  }
  if (kind == "shift_scale") {
    const auto v = split_numbers(args);
    if (v.size() != 2) throw DesignError(ErrorKind::InvalidInput, "shift_scale needs a,c");
    return {v[1] * Matrix::Identity(dim, dim), Vector::Constant(dim, v[0])};
  }
  throw DesignError(ErrorKind::InvalidInput, "unknown transform '" + name + "'");
}

std::string to_string(ParamMode mode) {
  return mode == ParamMode::Linear ? "linear" : "intercept_rescaled";
}

ParamMode parse_param_mode(const std::string& text) {
  if (text == "linear") return ParamMode::Linear;
  if (text == "intercept_rescaled" || text == "rescaled") return ParamMode::InterceptRescaled;
  throw DesignError(ErrorKind::InvalidInput, "unknown param_mode '" + text + "'");
}

}  // namespace optdesign
