#pragma once

#include "optdesign/criteria.hpp"
#include "optdesign/transforms.hpp"

#include <vector>

namespace optdesign {

/// Finite group of transformation pairs mapping the region onto itself.
/// elements()[0] is the identity.
class TransformGroup {
 public:
  const std::vector<TransformPair>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }

 private:
  friend TransformGroup generate_group(const ModelSpec&, const std::vector<TransformPair>&,
                                       std::size_t);
  std::vector<TransformPair> elements_;
};

/// Closure of the generators under composition, elements identified by their
/// action on a probe set. Throws NotRegionPreserving / GroupTooLarge, and
/// NotEquivariant if the parameter maps do not compose like the point maps.
TransformGroup generate_group(const ModelSpec& model, const std::vector<TransformPair>& generators,
                              std::size_t max_size = 64);

/// True iff g maps the region's extremal points onto themselves.
bool preserves_region(const Region& region, const AffinePointMap& g);

struct OrbitPartition {
  std::vector<std::vector<std::size_t>> orbits;
};

/// Orbits of the candidate points (CandidateSetNotClosed when an image is missing).
OrbitPartition orbits(const TransformGroup& group, const std::vector<Point>& candidates);

/// (1/|G|) sum_g xi^g with coincident points merged.
Design symmetrize(const ModelSpec& model, const Design& xi, const TransformGroup& group);

/// Design giving weight orbit_weights[k] to every point of orbit k; zero-weight
/// orbits dropped. WeightSumViolation unless sum_k |O_k| w_k = 1.
Design invariant_design(const std::vector<Point>& candidates, const OrbitPartition& partition,
                        const std::vector<double>& orbit_weights);

/// beta fixed by every parameter map and (IMSE) nu^g = nu for every element.
bool check_invariant_criterion(const TransformGroup& group, const Criterion& crit,
                               const Parameter& beta);

/// nu^g = nu as measures.
bool measure_invariant(const WeightingMeasure& nu, const AffinePointMap& g);

}  // namespace optdesign
