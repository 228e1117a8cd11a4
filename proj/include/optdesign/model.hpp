#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace optdesign {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// A covariate setting x in the experimental region.
using Point = Eigen::VectorXd;
/// Parameter vector beta of the linear component f(x)^T beta.
using Parameter = Eigen::VectorXd;

inline constexpr double kRegionTol = 1e-12;
inline constexpr double kPointMatchTol = 1e-9;
inline constexpr double kWeightSumTol = 1e-12;

/// Experimental region: a hyperrectangle or an explicit finite candidate list.
class Region {
 public:
  static Region box(Vector lower, Vector upper);
  static Region finite(std::vector<Point> points);

  bool is_box() const noexcept { return candidates_.empty(); }
  int dim() const noexcept { return static_cast<int>(lower_.size()); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  const std::vector<Point>& candidates() const noexcept { return candidates_; }

  /// Vertices of the box in lexicographic order, or the candidate list.
  std::vector<Point> extremal_points() const;
  bool contains(const Point& x, double tol = kRegionTol) const;

  /// Uniform grid with n points per coordinate (box) or the candidates.
  std::vector<Point> grid(int points_per_axis) const;

 private:
  Vector lower_;
  Vector upper_;
  std::vector<Point> candidates_;
};

bool same_point(const Point& a, const Point& b, double tol = kPointMatchTol);

/// Intensity lambda(z) of the elemental information lambda(f^T beta) f f^T.
class Intensity {
 public:
  using Function = std::function<double(double)>;

  static Intensity gamma_inverse_link(double kappa = 1.0);
  static Intensity custom(Function lambda);

  bool is_gamma() const noexcept { return !custom_; }
  double kappa() const noexcept { return kappa_; }
  double operator()(double z) const;

 private:
  double kappa_ = 1.0;
  Function custom_;
};

/// Regression basis f, intensity family and experimental region.
class ModelSpec {
 public:
  using Basis = std::function<Vector(const Point&)>;

  /// f(x) = (1, x_1, ..., x_d); the "linear" / "additive" built-in basis.
  static ModelSpec first_order(Region region, double kappa = 1.0);
  static ModelSpec custom(Region region, int p, Basis basis, Intensity intensity,
                          bool affine = false, bool has_intercept = false);

  int dim_x() const noexcept { return region_.dim(); }
  int p() const noexcept { return p_; }
  const Region& region() const noexcept { return region_; }
  const Intensity& intensity() const noexcept { return intensity_; }
  bool affine_basis() const noexcept { return affine_; }
  bool has_intercept() const noexcept { return intercept_; }
  bool builtin() const noexcept { return builtin_; }

  /// Basis values without the region check.
  Vector basis(const Point& x) const { return basis_(x); }

  /// Same basis and intensity on another region (image regions of transforms).
  ModelSpec with_region(Region region) const;
  ModelSpec with_kappa(double kappa) const;

 private:
  ModelSpec() = default;
  void validate() const;

  Region region_;
  int p_ = 0;
  Basis basis_;
  Intensity intensity_ = Intensity::gamma_inverse_link();
  bool affine_ = false;
  bool intercept_ = false;
  bool builtin_ = false;
};

/// Approximate design: distinct support points with positive weights summing to 1.
class Design {
 public:
  Design() = default;
  Design(std::vector<Point> support, std::vector<double> weights);

  /// Merges points closer than `tol`, drops nonpositive weights and
  /// renormalizes. Keeps first-occurrence order.
  static Design merged(const std::vector<Point>& support, const std::vector<double>& weights,
                       double tol = kPointMatchTol);

  std::size_t size() const noexcept { return support_.size(); }
  const std::vector<Point>& support() const noexcept { return support_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Point& point(std::size_t i) const { return support_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Weight at x (0 if x is not a support point).
  double weight_at(const Point& x, double tol = kPointMatchTol) const;
  /// Support in lexicographic order.
  Design sorted() const;

 private:
  std::vector<Point> support_;
  std::vector<double> weights_;
};

/// Weighting measure nu of the IMSE criterion.
class WeightingMeasure {
 public:
  enum class Kind { Discrete, Uniform };

  static WeightingMeasure discrete(std::vector<Point> points, std::vector<double> weights);
  static WeightingMeasure uniform(Vector lower, Vector upper);
  static WeightingMeasure uniform_over(const Region& region);

  Kind kind() const noexcept { return kind_; }
  bool is_uniform() const noexcept { return kind_ == Kind::Uniform; }
  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

 private:
  Kind kind_ = Kind::Discrete;
  std::vector<Point> points_;
  std::vector<double> weights_;
  Vector lower_;
  Vector upper_;
};

inline constexpr int kDefaultQuadratureOrder = 32;

Vector eval_basis(const ModelSpec& model, const Point& x);
double intensity(const ModelSpec& model, double z);
Matrix elemental_info(const ModelSpec& model, const Point& x, const Parameter& beta);
Matrix design_info(const ModelSpec& model, const Design& xi, const Parameter& beta);
Matrix weight_matrix_v(const ModelSpec& model, const Parameter& beta, const WeightingMeasure& nu,
                       int quadrature_order = kDefaultQuadratureOrder);

/// Throws OutOfRegion (with index) if a support point is outside the region.
void validate_design(const ModelSpec& model, const Design& xi);
void validate_measure(const ModelSpec& model, const WeightingMeasure& nu);

/// Points at which positivity of f(x)^T beta is checked.
std::vector<Point> positivity_points(const ModelSpec& model);
bool is_admissible(const ModelSpec& model, const Parameter& beta);
/// Throws NonpositiveLinearComponent when beta is outside the parameter region.
void check_parameter(const ModelSpec& model, const Parameter& beta);

}  // namespace optdesign
