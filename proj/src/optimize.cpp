#include "optdesign/optimize.hpp"

#include "optdesign/error.hpp"
#include "optdesign/transforms.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

namespace optdesign {

namespace {

Design weights_on(const std::vector<Point>& pts, const std::vector<double>& w) {
  std::vector<Point> sp;
  std::vector<double> sw;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (w[i] > 0.0) {
      sp.push_back(pts[i]);
      sw.push_back(w[i]);
    }
  }
  const double total = std::accumulate(sw.begin(), sw.end(), 0.0);
  for (auto& v : sw) v /= total;
  return Design(std::move(sp), std::move(sw));
}

Point point1(double x) {
  Point p(1);
  p << x;
  return p;
}

Point point2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

// Sensitivities of rows i and j of g under weights w; nullopt if M is singular.
std::optional<std::pair<double, double>> pair_sensitivity(const Matrix& g, const Matrix& v, bool d_crit,
                                                          const Vector& w, Eigen::Index i, Eigen::Index j) {
  const Matrix info = g.transpose() * w.asDiagonal() * g;
  Eigen::LLT<Matrix> llt(info);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix rows(g.cols(), 2);
  rows.col(0) = g.row(i).transpose();
  rows.col(1) = g.row(j).transpose();
  const Matrix y = llt.solve(rows);
  if (d_crit) return std::make_pair(rows.col(0).dot(y.col(0)), rows.col(1).dot(y.col(1)));
  return std::make_pair(y.col(0).dot(v * y.col(0)), y.col(1).dot(v * y.col(1)));
}

// Vertex exchange: move mass from the least to the most sensitive point. Along
// that direction the criterion's derivative is s_lo - s_hi, so the step is the
// root of s_hi = s_lo, found by bisection.
void exchange_step(const Matrix& g, const Matrix& v, bool d_crit, Vector& w) {
  Eigen::LLT<Matrix> llt(g.transpose() * w.asDiagonal() * g);
  if (llt.info() != Eigen::Success) return;
  const Matrix y = llt.solve(g.transpose());
  const Vector sens = d_crit ? Vector((g.transpose().array() * y.array()).colwise().sum().transpose())
                             : Vector(((v * y).array() * y.array()).colwise().sum().transpose());
  Eigen::Index hi = 0, lo = -1;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (sens[i] > sens[hi]) hi = i;
    if (w[i] > 0.0 && (lo < 0 || sens[i] < sens[lo])) lo = i;
  }
  if (lo < 0 || lo == hi) return;
  auto gain = [&](double delta) {
    Vector t = w;
    t[hi] += delta;
    t[lo] -= delta;
    const auto sp = pair_sensitivity(g, v, d_crit, t, hi, lo);
    return sp ? sp->first - sp->second : -kInfinity;
  };
  if (!(gain(0.0) > 0.0)) return;
  double a = 0.0, b = w[lo];
  if (gain(b) > 0.0) {
    a = b;
  } else {
    for (int k = 0; k < 200 && b - a > 1e-17; ++k) {
      const double mid = 0.5 * (a + b);
      (gain(mid) > 0.0 ? a : b) = mid;
    }
  }
  w[hi] += a;
  w[lo] -= a;
  if (w[lo] < 1e-300) w[lo] = 0.0;
}

}  // namespace

OptimizationResult optimal_weights_fixed_support(const ModelSpec& model, const Parameter& beta,
                                                 const Criterion& crit,
                                                 const std::vector<Point>& support,
                                                 const OptimizeOptions& opts) {
  check_parameter(model, beta);
  const int p = model.p();
  const auto m = static_cast<Eigen::Index>(support.size());
  if (m == 0) throw DesignError(ErrorKind::InvalidInput, "empty support");

  // Rows sqrt(lambda_i) f_i, so that M = G^T diag(w) G.
  Matrix g(m, p);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vector f = eval_basis(model, support[static_cast<std::size_t>(i)]);
    g.row(i) = std::sqrt(intensity(model, f.dot(beta))) * f.transpose();
  }
  {
    Eigen::FullPivLU<Matrix> lu(g);
    lu.setThreshold(1e-10);
    if (lu.rank() < p) {
      throw DesignError(ErrorKind::SingularInformation, "support cannot carry a nonsingular design");
    }
  }
  const bool d_crit = crit.is_d();
  Matrix v;
  if (!d_crit) v = weight_matrix_v(model, beta, crit.measure(), crit.quadrature_order);

  Vector w = Vector::Constant(m, 1.0 / static_cast<double>(m));
  Vector s(m);
  Matrix info(p, p);
  Matrix y(p, m);
  double last_step = kInfinity;
  double gap = kInfinity;
  OptimizationResult out;
  int it = 0;
  for (;; ++it) {
    info.noalias() = g.transpose() * w.asDiagonal() * g;
    Eigen::LLT<Matrix> llt(info);
    if (llt.info() != Eigen::Success) {
      throw DesignError(ErrorKind::SingularInformation, "information matrix lost definiteness");
    }
    double bound = 0.0;
    double value = 0.0;
    y = llt.solve(g.transpose());
    if (d_crit) {
      s = (g.transpose().array() * y.array()).colwise().sum().transpose();
      bound = p;
      const Matrix l = llt.matrixL();
      value = 1.0;
      for (int k = 0; k < p; ++k) value /= l(k, k) * l(k, k);
    } else {
      s = ((v * y).array() * y.array()).colwise().sum().transpose();
      bound = llt.solve(v).trace();
      value = bound;
    }
    if (it % 100 == 0) out.history.push_back(value);
    gap = s.maxCoeff() - bound;
    const bool certified = gap <= bound * opts.sensitivity_tol;
    if (certified && (last_step <= opts.weight_tol || it >= opts.max_iters)) break;
    if (it >= opts.max_iters) {
      std::ostringstream os;
      os << "multiplicative algorithm did not converge in " << opts.max_iters
         << " iterations (sensitivity gap " << gap << ")";
      throw DesignError(ErrorKind::NoConvergence, os.str());
    }
    Vector next = d_crit ? Vector(w.array() * s.array() / bound)
                         : Vector(w.array() * (s.array() / bound).sqrt());
    next /= next.sum();
    exchange_step(g, v, d_crit, next);
    last_step = (next - w).cwiseAbs().maxCoeff();
    w = std::move(next);
  }

  std::vector<double> pruned(w.data(), w.data() + m);
  for (auto& x : pruned) {
    if (x < opts.prune_threshold) x = 0.0;
  }
  out.design = weights_on(support, pruned);
  out.iterations = it;
  out.criterion_value = criterion_value(model, out.design, beta, crit);
  out.certificate = equivalence_check(model, out.design, beta, crit, support, opts.sensitivity_tol);

  // Points below the bound only lose weight geometrically; drop the small ones
  // and re-solve on the rest, keeping the result if it still certifies.
  const double bound = d_crit ? static_cast<double>(p) : s.dot(w);
  std::vector<Point> kept;
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool fading = w[i] < 1e-3 && s[i] < bound * (1.0 - opts.sensitivity_tol);
    if (pruned[static_cast<std::size_t>(i)] > 0.0 && !fading) kept.push_back(support[static_cast<std::size_t>(i)]);
  }
  if (out.certificate.passed && kept.size() >= static_cast<std::size_t>(p) && kept.size() < out.design.size()) {
    try {
      OptimizationResult polished = optimal_weights_fixed_support(model, beta, crit, kept, opts);
      polished.certificate =
          equivalence_check(model, polished.design, beta, crit, support, opts.sensitivity_tol);
      if (polished.certificate.passed) {
        polished.iterations += out.iterations;
        polished.history = std::move(out.history);
        return polished;
      }
    } catch (const DesignError&) {
      // reduced support singular or slow: keep the unpolished result
    }
  }
  return out;
}

Design prop1_closed_form(const Parameter& beta, Prop1Measure nu) {
  if (beta.size() != 2) {
    throw DesignError(ErrorKind::WrongModelShape, "one-factor parameter (beta0, beta1) expected");
  }
  const double a = beta[0];
  const double b = beta[0] + beta[1];
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DesignError(ErrorKind::OutOfParameterRegion, "beta0 and beta0 + beta1 must be positive");
  }
  double w0 = 0.5;
  switch (nu) {
    case Prop1Measure::UniformContinuous: w0 = 0.5; break;
    case Prop1Measure::UniformEndpoints: w0 = b / (a + b); break;
    case Prop1Measure::MidpointMass: w0 = a / (a + b); break;
  }
  return Design({point1(0.0), point1(1.0)}, {w0, 1.0 - w0});
}

double w_star_beta1_zero(double gamma2) {
  if (!(gamma2 > -1.0)) {
    throw DesignError(ErrorKind::OutOfParameterRegion, "gamma2 must exceed -1");
  }
  if (gamma2 == 0.0) return 0.25;
  // Stationary point of det M = 2 w (1/2 - w) (l1^2 l3 w + l1 l3^2 (1/2 - w)),
  // l3 / l1 = (1 + g)^{-2}. With t = g (g + 2) the weight solves
  // 3t w^2 - (t - 1) w - 1/4 = 0, i.e. 1/w = 2 (sqrt(t^2 + t + 1) - (t - 1)).
  const double t = gamma2 * (gamma2 + 2.0);
  const double s = std::sqrt(t * t + t + 1.0);
  if (t <= 1.0) return 1.0 / (2.0 * (s - (t - 1.0)));
  return (s + (t - 1.0)) / (6.0 * t);
}

std::vector<Point> unit_square_vertices() {
  return {point2(0, 0), point2(0, 1), point2(1, 0), point2(1, 1)};
}

Design equal_slopes_closed_form(double gamma) {
  if (!(gamma > -0.5)) {
    throw DesignError(ErrorKind::OutOfParameterRegion, "gamma must exceed -1/2");
  }
  const auto v = unit_square_vertices();
  const double third = 1.0 / 3.0;
  if (gamma >= 1.0) return weights_on(v, {third, third, third, 0.0});
  if (gamma <= -third) return weights_on(v, {0.0, third, third, third});
  const double w1 = (3.0 * gamma + 1.0) / (4.0 * (2.0 * gamma + 1.0));
  const double w2 = (gamma + 1.0) * (gamma + 1.0) / (4.0 * (2.0 * gamma + 1.0));
  const double w3 = (1.0 - gamma) / 4.0;
  return weights_on(v, {w1, w2, w2, w3});
}

std::string to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::B1: return "B1";
    case RegionLabel::B2: return "B2";
    case RegionLabel::B3: return "B3";
    case RegionLabel::B4: return "B4";
    case RegionLabel::Interior: return "Interior";
  }
  return "Interior";
}

RegionLabel classify_region(double g1, double g2) {
  if (!(g1 > -1.0) || !(g2 > -1.0) || !(g1 + g2 > -1.0)) {
    throw DesignError(ErrorKind::OutOfParameterRegion, "reduced parameter outside the region");
  }
  const double prod = g1 * g2;
  if (1.0 - prod <= 0.0) return RegionLabel::B1;
  if ((1.0 + g1 + g2) * (1.0 + g1 + g2) - prod <= 0.0) return RegionLabel::B2;
  if ((1.0 + g1) * (1.0 + g1) + prod <= 0.0) return RegionLabel::B3;
  if ((1.0 + g2) * (1.0 + g2) + prod <= 0.0) return RegionLabel::B4;
  return RegionLabel::Interior;
}

Design minimal_support_design(RegionLabel label) {
  // lexicographic slots: 0 = x1 (0,0), 1 = x3 (0,1), 2 = x2 (1,0), 3 = x4 (1,1)
  const double t = 1.0 / 3.0;
  const auto v = unit_square_vertices();
  switch (label) {
    case RegionLabel::B1: return weights_on(v, {t, t, t, 0});
    case RegionLabel::B2: return weights_on(v, {0, t, t, t});
    case RegionLabel::B3: return weights_on(v, {t, 0, t, t});
    case RegionLabel::B4: return weights_on(v, {t, t, 0, t});
    case RegionLabel::Interior: break;
  }
  throw DesignError(ErrorKind::InvalidInput, "interior points have no minimally supported optimum");
}

OptimizationResult local_opt_design(const ModelSpec& model, const Parameter& beta,
                                    const Criterion& crit,
                                    const std::optional<std::vector<Point>>& candidates,
                                    const OptimizeOptions& opts) {
  check_parameter(model, beta);
  std::vector<Point> cands = candidates ? *candidates : model.region().extremal_points();
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!model.region().contains(cands[i])) {
      throw DesignError(ErrorKind::OutOfRegion, "candidate outside the region", i);
    }
  }
  auto grid = equivalence_points(model.region());
  grid.insert(grid.end(), cands.begin(), cands.end());

  constexpr int kMaxAugmentations = 50;
  Certificate cert;
  for (int aug = 0;; ++aug) {
    OptimizationResult res = optimal_weights_fixed_support(model, beta, crit, cands, opts);
    cert = equivalence_check(model, res.design, beta, crit, grid, opts.sensitivity_tol);
    if (cert.passed) {
      res.certificate = cert;
      return res;
    }
    const bool known = std::any_of(cands.begin(), cands.end(),
                                   [&](const Point& c) { return same_point(c, cert.argmax); });
    if (aug >= kMaxAugmentations || known) break;
    // carry only the current support forward; zero-weight points slow the iteration
    cands = res.design.support();
    cands.push_back(cert.argmax);
  }
  std::ostringstream os;
  os << "equivalence check failed: sensitivity " << cert.max_sensitivity << " > bound "
     << cert.bound << " at (";
  for (Eigen::Index k = 0; k < cert.argmax.size(); ++k) os << (k ? ", " : "") << cert.argmax[k];
  os << ")";
  throw DesignError(ErrorKind::EquivalenceCheckFailed, os.str());
}

double InvariantFamily::w_max() const {
  if (partition.orbits.size() != 2) {
    throw DesignError(ErrorKind::InvalidInput, "invariant family needs exactly two orbits");
  }
  return 1.0 / static_cast<double>(partition.orbits[0].size());
}

Design InvariantFamily::design(double w) const {
  const double top = w_max();
  if (w < 0.0 || w > top) throw DesignError(ErrorKind::InvalidInput, "family weight out of range");
  const double rest = (1.0 - w / top) / static_cast<double>(partition.orbits[1].size());
  std::vector<double> weights(candidates.size(), 0.0);
  for (auto i : partition.orbits[0]) weights[i] = w;
  for (auto i : partition.orbits[1]) weights[i] = rest;
  return weights_on(candidates, weights);
}

InvariantFamily equal_slopes_family() {
  const Region square = Region::box(Vector::Zero(2), Vector::Ones(2));
  const ModelSpec model = ModelSpec::first_order(square);
  const auto swap = make_pair(model, named_map("swap:1,2", square), ParamMode::InterceptRescaled);
  const auto flip = make_pair(model, named_map("reflect:1,2", square), ParamMode::InterceptRescaled);
  const TransformGroup group = generate_group(model, {swap, flip});
  InvariantFamily fam;
  fam.candidates = unit_square_vertices();
  fam.partition = orbits(group, fam.candidates);
  // orbit 0 must be {(0,0), (1,1)}
  if (fam.partition.orbits.size() == 2 && fam.partition.orbits[0].front() != 0) {
    std::swap(fam.partition.orbits[0], fam.partition.orbits[1]);
  }
  return fam;
}

std::vector<double> equal_slopes_gamma_grid(int per_decade) {
  if (per_decade < 1) throw DesignError(ErrorKind::InvalidInput, "per_decade must be positive");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double delta = std::pow(10.0, -4.0 + static_cast<double>(k) / per_decade);
    if (delta >= 0.5) break;
    out.push_back(-0.5 + delta);
  }
  out.push_back(-1.0 / 3.0);
  out.push_back(0.0);
  for (int k = 0; k <= 7 * per_decade; ++k) {
    out.push_back(std::pow(10.0, -3.0 + static_cast<double>(k) / per_decade));
  }
  out.push_back(1.0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            out.end());
  return out;
}

namespace {

struct MaximinContext {
  const ModelSpec& model;
  const Criterion& crit;
  const InvariantFamily& family;
  const std::vector<Parameter>& grid;
  const MaximinOptions& opts;
  std::vector<double> reference;  // homogeneous value of the local optimum per grid point

  MaximinResult evaluate(double w) const {
    MaximinResult r;
    r.w = w;
    r.design = family.design(w);
    r.min_efficiency = kInfinity;
    r.efficiencies.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double phi = homogeneous_value(model, r.design, grid[i], crit);
      const double eff = std::isfinite(phi) ? reference[i] / phi : 0.0;
      r.efficiencies.push_back(eff);
      if (eff < r.min_efficiency) {
        r.min_efficiency = eff;
        r.worst_index = i;
      }
    }
    if (opts.include_gamma_infinity_limit) {
      const double h = 27.0 * w * (1.0 - 2.0 * w) * (1.0 - w) / 4.0;
      r.limit_efficiency = std::cbrt(std::max(h, 0.0));
      if (r.limit_efficiency <= r.min_efficiency) {
        r.min_efficiency = r.limit_efficiency;
        r.worst_at_limit = true;
      }
    }
    r.worst_at_grid_edge = !r.worst_at_limit && r.worst_index + 1 == grid.size();
    return r;
  }
};

MaximinContext make_context(const ModelSpec& model, const Criterion& crit,
                            const InvariantFamily& family, const std::vector<Parameter>& grid,
                            const MaximinOptions& opts) {
  if (grid.empty()) throw DesignError(ErrorKind::EmptyGrid, "maximin parameter grid is empty");
  if (family.partition.orbits.size() != 2) {
    throw DesignError(ErrorKind::InvalidInput, "invariant family needs exactly two orbits");
  }
  MaximinContext ctx{model, crit, family, grid, opts, {}};
  ctx.reference.reserve(grid.size());
  for (const auto& beta : grid) {
    const Design local = opts.local_optimum ? opts.local_optimum(beta)
                                            : local_opt_design(model, beta, crit, {}, opts.inner).design;
    ctx.reference.push_back(homogeneous_value(model, local, beta, crit));
  }
  return ctx;
}

}  // namespace

MaximinResult evaluate_invariant(const ModelSpec& model, const Criterion& crit,
                                 const InvariantFamily& family, double w,
                                 const std::vector<Parameter>& param_grid,
                                 const MaximinOptions& opts) {
  return make_context(model, crit, family, param_grid, opts).evaluate(w);
}

MaximinResult maximin_invariant(const ModelSpec& model, const Criterion& crit,
                                const InvariantFamily& family,
                                const std::vector<Parameter>& param_grid,
                                const MaximinOptions& opts) {
  const MaximinContext ctx = make_context(model, crit, family, param_grid, opts);
  const double top = family.w_max();

  // Coarse scan to bracket the best w, then golden section inside the bracket.
  constexpr int kScan = 200;
  int best = 1;
  double best_val = -1.0;
  for (int k = 1; k < kScan; ++k) {
    const double v = ctx.evaluate(top * k / kScan).min_efficiency;
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  double lo = top * (best - 1) / kScan;
  double hi = top * (best + 1) / kScan;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = ctx.evaluate(x1).min_efficiency;
  double f2 = ctx.evaluate(x2).min_efficiency;
  while (hi - lo > opts.w_tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = ctx.evaluate(x2).min_efficiency;
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = ctx.evaluate(x1).min_efficiency;
    }
  }
  return ctx.evaluate(0.5 * (lo + hi));
}

}  // namespace optdesign
