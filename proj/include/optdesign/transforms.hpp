#pragma once

#include "optdesign/criteria.hpp"
#include "optdesign/model.hpp"

#include <optional>
#include <string>

namespace optdesign {

/// g(x) = b + A x with nonsingular A.
class AffinePointMap {
 public:
  AffinePointMap(Matrix a, Vector b);
  static AffinePointMap identity(int dim);

  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  int dim() const noexcept { return static_cast<int>(b_.size()); }

  Point operator()(const Point& x) const { return b_ + a_ * x; }
  AffinePointMap inverse() const;
  /// (this after first): x -> this(first(x)).
  AffinePointMap after(const AffinePointMap& first) const;
  /// One nonzero per row and column: boxes map onto boxes.
  bool axis_aligned() const;

 private:
  Matrix a_;
  Vector b_;
};

enum class ParamMode { Linear, InterceptRescaled };

/// Point map g with f(g(x)) = Q f(x), and the induced parameter map
/// beta -> Q^{-T} beta (Linear) or c(beta) Q^{-T} beta with the intercept kept.
class TransformPair {
 public:
  TransformPair(AffinePointMap g, Matrix q, ParamMode mode);

  const AffinePointMap& g() const noexcept { return g_; }
  const Matrix& q() const noexcept { return q_; }
  ParamMode mode() const noexcept { return mode_; }

 private:
  AffinePointMap g_;
  Matrix q_;
  ParamMode mode_;
};

/// Solves f(g(x_i)) = Q f(x_i) on p well-conditioned sample points and verifies
/// the residual on 50 further points (NotEquivariant / DegenerateSample).
Matrix derive_q(const ModelSpec& model, const AffinePointMap& g);

/// Builds a pair with a derived and verified Q.
TransformPair make_pair(const ModelSpec& model, const AffinePointMap& g,
                        ParamMode mode = ParamMode::Linear);

/// Max over samples of ||f(g(x)) - Q f(x)||.
double equivariance_residual(const ModelSpec& model, const TransformPair& pair);

/// Intercept-preserving factor beta_0 / (Q^{-T} beta)_0.
double rescale_factor(const TransformPair& pair, const Parameter& beta);
Parameter param_transform(const TransformPair& pair, const Parameter& beta);

TransformPair inverse_pair(const TransformPair& pair);
/// Apply `first`, then `second`.
TransformPair compose(const TransformPair& first, const TransformPair& second);

/// Image of a box region; NonAxisAlignedImage for maps that do not send boxes to boxes.
Region image_region(const Region& region, const AffinePointMap& g);
/// Same model on the image region g(X).
ModelSpec image_model(const ModelSpec& model, const AffinePointMap& g);

/// Support mapped pointwise, weights kept, coincident images merged.
/// OutOfRegion when an image point leaves `target`.
Design design_image(const Design& xi, const TransformPair& pair, const ModelSpec& target);
Design design_image(const Design& xi, const TransformPair& pair);

/// nu^g: atoms mapped with weights kept; uniform boxes mapped to image boxes.
WeightingMeasure measure_image(const WeightingMeasure& nu, const AffinePointMap& g);

/// Max relative entrywise residual between M(xi^g; g~(beta)) and
/// Q M(xi; beta) Q^T (times c(beta)^{-2} in rescaled mode).
double verify_info_equivariance(const ModelSpec& model, const Design& xi, const Parameter& beta,
                                const TransformPair& pair);

struct TransferredDesign {
  ModelSpec model;  // on the image region
  Design design;
  Parameter beta;
  std::optional<WeightingMeasure> nu;
};

/// Optimal design, parameter and (IMSE) measure carried to the image region.
TransferredDesign transfer_optimal(const ModelSpec& model, const Design& xi_opt,
                                   const Parameter& beta, const TransformPair& pair,
                                   const Criterion& crit);

/// Named point maps on a box region (1-based coordinates):
///   "identity", "reflect:1,2" (x_k -> lo_k + hi_k - x_k), "swap:1,2",
///   "shift_scale:a,c" (x -> a + c x in every coordinate).
AffinePointMap named_map(const std::string& name, const Region& region);

std::string to_string(ParamMode mode);
ParamMode parse_param_mode(const std::string& text);

}  // namespace optdesign
