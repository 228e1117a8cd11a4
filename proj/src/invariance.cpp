#include "optdesign/invariance.hpp"

#include "optdesign/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace optdesign {

namespace {

std::vector<Point> probe_set(const Region& region) {
  std::vector<Point> probes = region.extremal_points();
  if (!region.is_box()) return probes;
  std::mt19937_64 rng(17U);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 0; n < 8; ++n) {
    Point x(region.dim());
    for (int d = 0; d < region.dim(); ++d) {
      x[d] = region.lower()[d] + unit(rng) * (region.upper()[d] - region.lower()[d]);
    }
    probes.push_back(std::move(x));
  }
  return probes;
}

bool same_action(const AffinePointMap& a, const AffinePointMap& b, const std::vector<Point>& probes) {
  return std::all_of(probes.begin(), probes.end(),
                     [&](const Point& x) { return same_point(a(x), b(x), 1e-10); });
}

// Admissible parameters with intercept: slopes in [-1,1], beta_0 chosen so that
// the smallest linear component over the region lies in [0.1, 1].
std::vector<Parameter> random_parameters(const ModelSpec& model, std::size_t count) {
  std::mt19937_64 rng(23U);
  std::uniform_real_distribution<double> slope(-1.0, 1.0);
  std::uniform_real_distribution<double> margin(0.1, 1.0);
  const auto pts = positivity_points(model);
  std::vector<Parameter> out;
  for (std::size_t n = 0; n < count; ++n) {
    Parameter beta(model.p());
    for (int j = 0; j < model.p(); ++j) beta[j] = slope(rng);
    double min_z = kInfinity;
    for (const auto& x : pts) min_z = std::min(min_z, model.basis(x).dot(beta));
    beta[0] += margin(rng) - min_z;
    out.push_back(std::move(beta));
  }
  return out;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

bool preserves_region(const Region& region, const AffinePointMap& g) {
  const auto ext = region.extremal_points();
  for (const auto& x : ext) {
    const Point y = g(x);
    if (std::none_of(ext.begin(), ext.end(), [&](const Point& e) { return same_point(e, y); })) {
      return false;
    }
  }
  return true;
}

TransformGroup generate_group(const ModelSpec& model, const std::vector<TransformPair>& generators,
                              std::size_t max_size) {
  const int dim = model.dim_x();
  const ParamMode mode = generators.empty() ? ParamMode::Linear : generators.front().mode();
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].mode() != mode) {
      throw DesignError(ErrorKind::InvalidInput, "generators mix parameter modes", i);
    }
    if (!preserves_region(model.region(), generators[i].g())) {
      throw DesignError(ErrorKind::NotRegionPreserving,
                        "generator does not map the region onto itself", i);
    }
  }
  const auto probes = probe_set(model.region());

  TransformGroup group;
  group.elements_.emplace_back(AffinePointMap::identity(dim),
                               Matrix::Identity(model.p(), model.p()), mode);
  auto find = [&](const AffinePointMap& g) -> std::size_t {
    for (std::size_t k = 0; k < group.elements_.size(); ++k) {
      if (same_action(group.elements_[k].g(), g, probes)) return k;
    }
    return group.elements_.size();
  };
  for (std::size_t head = 0; head < group.elements_.size(); ++head) {
    for (const auto& gen : generators) {
      TransformPair next = compose(group.elements_[head], gen);
      if (find(next.g()) == group.elements_.size()) {
        if (group.elements_.size() >= max_size) {
          throw DesignError(ErrorKind::GroupTooLarge, "group closure exceeds the size limit");
        }
        group.elements_.push_back(std::move(next));
      }
    }
  }

  // Inverses and the parameter-map group law, checked numerically.
  const bool check_params = model.has_intercept() && model.intensity().is_gamma();
  const auto betas = check_params ? random_parameters(model, 20) : std::vector<Parameter>{};
  for (const auto& a : group.elements_) {
    if (find(a.g().inverse()) == group.elements_.size()) {
      throw DesignError(ErrorKind::InvalidInput, "group element without inverse");
    }
    for (const auto& b : group.elements_) {
      const TransformPair ab = compose(a, b);
      const std::size_t k = find(ab.g());
      if (k == group.elements_.size()) {
        throw DesignError(ErrorKind::InvalidInput, "group is not closed under composition");
      }
      for (const auto& beta : betas) {
        const Parameter direct = param_transform(group.elements_[k], beta);
        const Parameter chained = param_transform(b, param_transform(a, beta));
        if ((direct - chained).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, beta.cwiseAbs().maxCoeff())) {
          throw DesignError(ErrorKind::NotEquivariant,
                            "parameter maps do not share the group structure");
        }
      }
    }
  }
  return group;
}

OrbitPartition orbits(const TransformGroup& group, const std::vector<Point>& candidates) {
  UnionFind uf(candidates.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (const auto& el : group.elements()) {
      const Point y = el.g()(candidates[i]);
      auto it = std::find_if(candidates.begin(), candidates.end(),
                             [&](const Point& c) { return same_point(c, y); });
      if (it == candidates.end()) {
        missing.push_back(i);
        continue;
      }
      uf.unite(i, static_cast<std::size_t>(it - candidates.begin()));
    }
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << "images missing from the candidate set for candidates";
    for (auto i : missing) os << ' ' << i;
    throw DesignError(ErrorKind::CandidateSetNotClosed, os.str(), missing.front());
  }
  OrbitPartition part;
  std::vector<std::size_t> slot(candidates.size(), candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] == candidates.size()) {
      slot[root] = part.orbits.size();
      part.orbits.emplace_back();
    }
    part.orbits[slot[root]].push_back(i);
  }
  return part;
}

Design symmetrize(const ModelSpec& model, const Design& xi, const TransformGroup& group) {
  std::vector<Point> pts;
  std::vector<double> w;
  const double share = 1.0 / static_cast<double>(group.size());
  for (const auto& el : group.elements()) {
    for (std::size_t i = 0; i < xi.size(); ++i) {
      Point y = el.g()(xi.point(i));
      if (!model.region().contains(y)) {
        throw DesignError(ErrorKind::OutOfRegion, "symmetrized support leaves the region", i);
      }
      pts.push_back(std::move(y));
      w.push_back(xi.weight(i) * share);
    }
  }
  return Design::merged(pts, w);
}

Design invariant_design(const std::vector<Point>& candidates, const OrbitPartition& partition,
                        const std::vector<double>& orbit_weights) {
  if (orbit_weights.size() != partition.orbits.size()) {
    throw DesignError(ErrorKind::InvalidInput, "one weight per orbit is required");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < orbit_weights.size(); ++k) {
    if (orbit_weights[k] < 0.0) throw DesignError(ErrorKind::InvalidInput, "negative orbit weight", k);
    total += orbit_weights[k] * static_cast<double>(partition.orbits[k].size());
  }
  if (std::abs(total - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os << "orbit weights give total mass " << total;
    throw DesignError(ErrorKind::WeightSumViolation, os.str());
  }
  std::vector<Point> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t k = 0; k < partition.orbits.size(); ++k) {
      const auto& orb = partition.orbits[k];
      if (orbit_weights[k] > 0.0 && std::find(orb.begin(), orb.end(), i) != orb.end()) {
        pts.push_back(candidates[i]);
        w.push_back(orbit_weights[k]);
      }
    }
  }
  // exact renormalization away from floating drift
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= sum;
  return Design(std::move(pts), std::move(w));
}

bool measure_invariant(const WeightingMeasure& nu, const AffinePointMap& g) {
  if (nu.is_uniform()) {
    if (!g.axis_aligned()) return false;
    const Point a = g(nu.lower());
    const Point b = g(nu.upper());
    return same_point(a.cwiseMin(b), nu.lower(), 1e-10) && same_point(a.cwiseMax(b), nu.upper(), 1e-10);
  }
  const auto& pts = nu.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point y = g(pts[i]);
    bool matched = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (same_point(pts[j], y) && std::abs(nu.weights()[j] - nu.weights()[i]) <= 1e-9) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

bool check_invariant_criterion(const TransformGroup& group, const Criterion& crit,
                               const Parameter& beta) {
  const double tol = 1e-9 * std::max(1.0, beta.cwiseAbs().maxCoeff());
  for (const auto& el : group.elements()) {
    try {
      if ((param_transform(el, beta) - beta).cwiseAbs().maxCoeff() > tol) return false;
    } catch (const DesignError&) {
      return false;
    }
    if (!crit.is_d() && !measure_invariant(crit.measure(), el.g())) return false;
  }
  return true;
}

}  // namespace optdesign
