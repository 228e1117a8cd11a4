#pragma once

#include "optdesign/criteria.hpp"
#include "optdesign/invariance.hpp"
#include "optdesign/model.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace optdesign {

struct OptimizeOptions {
  int max_iters = 10000;
  double weight_tol = 1e-10;
  double sensitivity_tol = 1e-6;  // relative to the equivalence bound
  double prune_threshold = 1e-8;
};

struct OptimizationResult {
  Design design;
  double criterion_value = 0.0;
  Certificate certificate;
  int iterations = 0;
  /// Criterion value every 100 iterations of the main run.
  std::vector<double> history;
};

/// Multiplicative weight algorithm on a fixed support.
///   D:    w <- w * d(x) / p
///   IMSE: w <- w * sqrt(s(x) / T), renormalized, T = trace(V M^{-1})
/// Stops once every support sensitivity is within the bound and the weights
/// have settled; the result is pruned, renormalized and certified on `support`.
OptimizationResult optimal_weights_fixed_support(const ModelSpec& model, const Parameter& beta,
                                                 const Criterion& crit,
                                                 const std::vector<Point>& support,
                                                 const OptimizeOptions& opts = {});

/// Weighting measures of the one-factor IMSE closed forms on [0, 1].
enum class Prop1Measure { UniformContinuous, UniformEndpoints, MidpointMass };

/// Endpoint weights (at 0, at 1) of the locally IMSE-optimal one-factor design.
Design prop1_closed_form(const Parameter& beta, Prop1Measure nu);

/// Optimal orbit weight for the two-factor model with beta_1 = 0, gamma2 = beta_2 / beta_0:
/// the maximizer of det M over the G3-invariant vertex designs (tends to 1/6 as
/// gamma2 -> -1 and to 1/3 as gamma2 -> infinity).
double w_star_beta1_zero(double gamma2);

/// Locally D-optimal design at beta = (1, gamma, gamma) on the vertices of
/// [0,1]^2, lexicographic order (0,0), (0,1), (1,0), (1,1).
Design equal_slopes_closed_form(double gamma);

enum class RegionLabel { B1, B2, B3, B4, Interior };

std::string to_string(RegionLabel label);

/// Optimality region of the minimally supported D-optimal designs in reduced
/// parameters gamma_j = beta_j / beta_0. Ties go to the lower index.
RegionLabel classify_region(double gamma1, double gamma2);

/// Equal-weight minimally supported design of a region label on [0,1]^2
/// (B1: x1,x2,x3; B2: x2,x3,x4; B3: x1,x2,x4; B4: x1,x3,x4).
Design minimal_support_design(RegionLabel label);

/// Vertices of [0,1]^2 in lexicographic order.
std::vector<Point> unit_square_vertices();

/// Fixed-support optimization on the candidates (default: extremal points),
/// then a full-region equivalence check; failing points are added to the
/// candidates (at most 50 times).
OptimizationResult local_opt_design(const ModelSpec& model, const Parameter& beta,
                                    const Criterion& crit,
                                    const std::optional<std::vector<Point>>& candidates = {},
                                    const OptimizeOptions& opts = {});

/// One-parameter family of invariant designs on two orbits: every point of
/// orbit 0 gets weight w, every point of orbit 1 gets (1 - |O0| w) / |O1|.
struct InvariantFamily {
  std::vector<Point> candidates;
  OrbitPartition partition;

  double w_max() const;
  Design design(double w) const;
};

/// The G' = {id, g2, g5, g6} family on the vertices of [0,1]^2
/// (orbits {(0,0),(1,1)} and {(0,1),(1,0)}).
InvariantFamily equal_slopes_family();

struct MaximinOptions {
  /// Adds the gamma -> infinity efficiency h(w)^{1/3}, h(w) = 27 w (1-2w)(1-w) / 4,
  /// of the equal-slopes D family.
  bool include_gamma_infinity_limit = false;
  double w_tol = 1e-8;
  OptimizeOptions inner;
  /// Local optimum per grid parameter; local_opt_design when empty.
  std::function<Design(const Parameter&)> local_optimum;
};

struct MaximinResult {
  double w = 0.0;
  Design design;
  double min_efficiency = 0.0;
  /// Efficiency at each grid parameter for the returned design.
  std::vector<double> efficiencies;
  double limit_efficiency = 0.0;
  /// Worst case is the analytic limit term or the grid's last point.
  bool worst_at_limit = false;
  bool worst_at_grid_edge = false;
  std::size_t worst_index = 0;
};

/// Equal-slopes parameter grid: gamma = -1/2 + delta (delta log-spaced in
/// [1e-4, 1/2)), gamma = 0, and gamma log-spaced in [1e-3, 1e4].
std::vector<double> equal_slopes_gamma_grid(int per_decade = 8);

/// Golden-section search over w maximizing the minimal efficiency on the grid.
MaximinResult maximin_invariant(const ModelSpec& model, const Criterion& crit,
                                const InvariantFamily& family,
                                const std::vector<Parameter>& param_grid,
                                const MaximinOptions& opts = {});

/// Minimal efficiency of the family member at a fixed w.
MaximinResult evaluate_invariant(const ModelSpec& model, const Criterion& crit,
                                 const InvariantFamily& family, double w,
                                 const std::vector<Parameter>& param_grid,
                                 const MaximinOptions& opts = {});

}  // namespace optdesign
