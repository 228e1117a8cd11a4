#pragma once
// Independent reference computations. Nothing here calls into the library's
// numerics; models are the first-order gamma model with lambda(z) = 1/z^2.

#include "optdesign/model.hpp"

#include <cmath>
#include <random>
#include <vector>

#ifdef OPTDESIGN_HAVE_BOOST
#include <boost/math/quadrature/gauss_kronrod.hpp>
#endif

namespace oracle {

using optdesign::Matrix;
using optdesign::Parameter;
using optdesign::Point;
using optdesign::Vector;

inline Vector f(const Point& x) {
  Vector out(x.size() + 1);
  out[0] = 1.0;
  out.tail(x.size()) = x;
  return out;
}

inline double lambda(double z) { return 1.0 / (z * z); }

/// sum_i w_i lambda(f_i' beta) f_i f_i' written out directly.
inline Matrix info(const std::vector<Point>& pts, const std::vector<double>& w, const Parameter& beta) {
  const auto p = beta.size();
  Matrix m = Matrix::Zero(p, p);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vector fx = f(pts[i]);
    m += w[i] * lambda(fx.dot(beta)) * fx * fx.transpose();
  }
  return m;
}

/// Uniform-measure moments on [0,1] for z = a + (b - a) x:
/// v0 = (a^2+ab+b^2)/(3a^3b^3), v1 = (2a+b)/(6a^2b^3), v2 = 1/(3ab^3).
inline Matrix v_uniform_interval(double a, double b) {
  Matrix v(2, 2);
  v(0, 0) = (a * a + a * b + b * b) / (3 * a * a * a * b * b * b);
  v(0, 1) = v(1, 0) = (2 * a + b) / (6 * a * a * b * b * b);
  v(1, 1) = 1.0 / (3 * a * b * b * b);
  return v;
}

/// Closed-form IMSE of endpoint weights (1-w at 0, w at 1) under uniform nu on [0,1].
inline double imse_uniform_interval(double a, double b, double w) {
  return (1.0 / (3 * a * b)) * (1.0 / w + 1.0 / (1.0 - w));
}

#ifdef OPTDESIGN_HAVE_BOOST
/// V on [0,1]^2 under the uniform measure by nested adaptive Gauss-Kronrod.
inline Matrix v_uniform_square(const Parameter& beta) {
  using boost::math::quadrature::gauss_kronrod;
  Matrix v(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      auto outer = [&](double x) {
        auto inner = [&](double y) {
          Point pt(2);
          pt << x, y;
          const Vector fx = f(pt);
          const double l = lambda(fx.dot(beta));
          return l * l * fx[i] * fx[j];
        };
        return gauss_kronrod<double, 61>::integrate(inner, 0.0, 1.0, 15, 1e-14);
      };
      v(i, j) = v(j, i) = gauss_kronrod<double, 61>::integrate(outer, 0.0, 1.0, 15, 1e-14);
    }
  }
  return v;
}
#endif

/// Vertices of [0,1]^2 in the order (0,0), (0,1), (1,0), (1,1).
inline std::vector<Point> square() {
  std::vector<Point> v;
  for (double a : {0.0, 1.0}) {
    for (double b : {0.0, 1.0}) {
      Point x(2);
      x << a, b;
      v.push_back(x);
    }
  }
  return v;
}

/// det M of xi_w = (w at (0,0) and (1,0), 1/2 - w at (0,1) and (1,1)), beta = (1, 0, g2).
inline double det_beta1_zero(double w, double g2) {
  const double weights[4] = {w, 0.5 - w, w, 0.5 - w};
  const double xs[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d fx(1.0, xs[i][0], xs[i][1]);
    m += weights[i] * lambda(1.0 + g2 * xs[i][1]) * fx * fx.transpose();
  }
  return m.determinant();
}

/// Maximizer of det over an n-point grid of (0, 1/2).
inline double brute_force_w_star(double g2, int n = 1000000) {
  double best_w = 0.0;
  double best = -1.0;
  for (int k = 1; k < n; ++k) {
    const double w = 0.5 * k / n;
    const double d = det_beta1_zero(w, g2);
    if (d > best) {
      best = d;
      best_w = w;
    }
  }
  return best_w;
}

inline Parameter vec(std::initializer_list<double> xs) {
  Parameter b(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) b[i++] = x;
  return b;
}

/// Random beta with f(x)'beta in [margin, ...] on the vertices of [lo,hi]^d.
inline Parameter random_beta(std::mt19937_64& rng, int d, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> slope(-2.0, 2.0);
  std::uniform_real_distribution<double> margin(0.05, 2.0);
  Parameter beta(d + 1);
  for (int j = 1; j <= d; ++j) beta[j] = slope(rng);
  double min_z = 0.0;
  for (int j = 1; j <= d; ++j) min_z += std::min(beta[j] * lo, beta[j] * hi);
  beta[0] = margin(rng) - min_z;
  return beta;
}

inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += (x = e(rng) + 1e-3);
  for (auto& x : w) x /= s;
  return w;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

}  // namespace oracle
