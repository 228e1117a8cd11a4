#include "optdesign/quadrature.hpp"

#include "optdesign/error.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace optdesign {

namespace {

// (P_n(x), P_{n-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double prev = 1.0;
  double cur = x;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

}  // namespace

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw DesignError(ErrorKind::InvalidInput, "quadrature order must be >= 1");
  QuadratureRule rule;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);
  if (order == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pn1] = legendre_pair(order, x);
      dp = order * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pn1] = legendre_pair(order, x);
    dp = order * (x * pn - pn1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

TensorRule tensor_gauss_legendre(const Vector& lower, const Vector& upper, int order) {
  const auto dim = static_cast<int>(lower.size());
  const QuadratureRule base = gauss_legendre(order);
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(order);

  TensorRule rule;
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  std::vector<int> idx(dim, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point x(dim);
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      const double t = base.nodes[idx[d]];
      x[d] = lower[d] + 0.5 * (upper[d] - lower[d]) * (t + 1.0);
      w *= 0.5 * base.weights[idx[d]];
    }
    rule.nodes.push_back(std::move(x));
    rule.weights.push_back(w);
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < order) break;
      idx[d] = 0;
    }
  }
  return rule;
}

}  // namespace optdesign
