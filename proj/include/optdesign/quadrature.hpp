#pragma once

#include "optdesign/model.hpp"

#include <vector>

namespace optdesign {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(int order);

/// Tensor-product Gauss-Legendre nodes on a box, weights normalized to sum 1
/// (the uniform probability measure on the box).
struct TensorRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

TensorRule tensor_gauss_legendre(const Vector& lower, const Vector& upper, int order);

}  // namespace optdesign
