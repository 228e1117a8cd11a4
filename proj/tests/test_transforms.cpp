#include "oracles.hpp"

#include "optdesign/error.hpp"
#include "optdesign/optimize.hpp"
#include "optdesign/transforms.hpp"

#include <doctest.h>

using namespace optdesign;
using oracle::vec;

namespace {

const ModelSpec& interval() {
  static const ModelSpec m = ModelSpec::first_order(Region::box(Vector::Zero(1), Vector::Ones(1)));
  return m;
}

const ModelSpec& square() {
  static const ModelSpec m = ModelSpec::first_order(Region::box(Vector::Zero(2), Vector::Ones(2)));
  return m;
}

// The vertices of [0,1]^2 as a finite region: images under any affine map stay finite regions.
const ModelSpec& vertices() {
  static const ModelSpec m = ModelSpec::first_order(Region::finite(oracle::square()));
  return m;
}

AffinePointMap shift_scale(double a, double c) {
  return AffinePointMap(Matrix::Constant(1, 1, c), Vector::Constant(1, a));
}

// Random nonsingular affine map of R^d.
AffinePointMap random_affine(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Matrix a(d, d);
  do {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = u(rng);
  } while (std::abs(a.determinant()) < 0.2);
  Vector b(d);
  for (int i = 0; i < d; ++i) b[i] = u(rng);
  return {a, b};
}

}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("derived Q matrices") {
  Matrix q1(2, 2);
  q1 << 1, 0, 2, 3;
  CHECK(derive_q(interval(), shift_scale(2, 3)).isApprox(q1, 1e-12));

  Matrix q2(3, 3);
  q2 << 1, 0, 0, 1, -1, 0, 1, 0, -1;
  CHECK(derive_q(square(), named_map("reflect:1,2", square().region())).isApprox(q2, 1e-12));
  CHECK(derive_q(square(), AffinePointMap::identity(2)).isApprox(Matrix::Identity(3, 3), 1e-12));
}

TEST_CASE("non-equivariant bases are rejected") {
  const Region r = Region::box(Vector::Zero(1), Vector::Ones(1));
  auto basis = [](const Point& x) { return vec({1.0, std::exp(x[0])}); };
  const ModelSpec m = ModelSpec::custom(r, 2, basis, Intensity::gamma_inverse_link(), false, true);
  try {
    derive_q(m, named_map("reflect:1", r));
    FAIL("expected NotEquivariant");
  } catch (const DesignError& e) {
    CHECK(e.kind() == ErrorKind::NotEquivariant);
  }
}

TEST_CASE("parameter maps") {
  const auto lin = make_pair(interval(), shift_scale(2, 3));
  const Parameter beta = vec({1.5, 0.6});
  CHECK(param_transform(lin, beta).isApprox(vec({1.5 - 2 * 0.6 / 3, 0.6 / 3}), 1e-14));

  const auto refl = make_pair(interval(), named_map("reflect:1", interval().region()), ParamMode::InterceptRescaled);
  for (double g : {-0.5, 0.0, 0.7, 3.0}) {
    const Parameter mapped = param_transform(refl, vec({1, g}));
    CHECK(mapped.isApprox(vec({1, -g / (1 + g)}), 1e-14));
    CHECK(param_transform(refl, mapped).isApprox(vec({1, g}), 1e-13));  // self-inverse
  }
  const auto id = make_pair(interval(), AffinePointMap::identity(1));
  CHECK(param_transform(id, beta) == beta);

  // (Q^{-T} beta)_0 = beta_0 + beta_1 = 0 leaves the rescale undefined
  const auto flip = make_pair(interval(), named_map("reflect:1", interval().region()), ParamMode::InterceptRescaled);
  try {
    param_transform(flip, vec({1, -1}));
    FAIL("expected RescaleUndefined");
  } catch (const DesignError& e) {
    CHECK(e.kind() == ErrorKind::RescaleUndefined);
  }
}

TEST_CASE("rescaled full reflection maps (1,3,3) to (1,-3/7,-3/7)") {
  const auto g2 = make_pair(square(), named_map("reflect:1,2", square().region()), ParamMode::InterceptRescaled);
  CHECK(param_transform(g2, vec({1, 3, 3})).isApprox(vec({1, -3.0 / 7, -3.0 / 7}), 1e-15));
}

TEST_CASE("design images") {
  const Design ends({vec({0}), vec({1})}, {0.5, 0.5});
  const double a = 2, b = 5;
  const auto pair = make_pair(interval(), shift_scale(a, b - a));
  const Design img = design_image(ends, pair);
  CHECK(img.weight_at(vec({2})) == 0.5);
  CHECK(img.weight_at(vec({5})) == 0.5);

  const Design id_img = design_image(ends, make_pair(interval(), AffinePointMap::identity(1)));
  CHECK(id_img.weight_at(vec({0})) == 0.5);

  const Design pb = prop1_closed_form(vec({1, 1}), Prop1Measure::UniformEndpoints);
  const Design swapped = design_image(pb, make_pair(interval(), named_map("reflect:1", interval().region())));
  CHECK(swapped.weight_at(vec({0})) == pb.weight_at(vec({1})));
  CHECK(swapped.weight_at(vec({1})) == pb.weight_at(vec({0})));

  try {
    design_image(ends, pair, interval());
    FAIL("expected OutOfRegion");
  } catch (const DesignError& e) {
    CHECK(e.kind() == ErrorKind::OutOfRegion);
  }
}

TEST_CASE("image regions and measures") {
  const auto g = shift_scale(2, 3);
  const Region r = image_region(interval().region(), g);
  CHECK(r.lower()[0] == 2);
  CHECK(r.upper()[0] == 5);
  const auto nu = measure_image(WeightingMeasure::uniform_over(interval().region()), g);
  CHECK(nu.is_uniform());
  CHECK(nu.upper()[0] == 5);

  Matrix rot(2, 2);
  rot << 1, 1, -1, 1;
  const AffinePointMap shear(rot, Vector::Zero(2));
  try {
    measure_image(WeightingMeasure::uniform_over(square().region()), shear);
    FAIL("expected NonAxisAlignedImage");
  } catch (const DesignError& e) {
    CHECK(e.kind() == ErrorKind::NonAxisAlignedImage);
  }
  const auto atoms = measure_image(WeightingMeasure::discrete({vec({0, 0}), vec({1, 0})}, {0.3, 0.7}), shear);
  CHECK(atoms.points()[1].isApprox(vec({1, -1})));
}

TEST_CASE("information transformation law") {
  // endpoint design, g(x) = a + c x: closed 2x2 form with lambda_0, lambda_1
  const double a = 2, c = 3;
  const auto pair = make_pair(interval(), shift_scale(a, c));
  const Design ends({vec({0}), vec({1})}, {0.4, 0.6});
  const Parameter beta = vec({1, 1});
  const Parameter bt = param_transform(pair, beta);
  const ModelSpec target = image_model(interval(), pair.g());
  const Matrix m_img = design_info(target, design_image(ends, pair), bt);
  const double l0 = 1.0, l1 = 0.25;
  Matrix expected(2, 2);
  expected << 0.4 * l0 + 0.6 * l1, 0.4 * l0 * a + 0.6 * l1 * (a + c), 0.4 * l0 * a + 0.6 * l1 * (a + c),
      0.4 * l0 * a * a + 0.6 * l1 * (a + c) * (a + c);
  CHECK(oracle::rel_diff(m_img, expected) < 1e-13);
  CHECK(verify_info_equivariance(interval(), ends, beta, pair) < 1e-10);

  std::mt19937_64 rng(41);
  for (int n = 0; n < 100; ++n) {
    const int d = 1 + n % 2;
    const ModelSpec& m = d == 1 ? interval() : square();
    const auto g = random_affine(rng, d);
    const Parameter b = oracle::random_beta(rng, d);
    const Design xi(m.region().extremal_points(), oracle::random_simplex(rng, d == 1 ? 2 : 4));
    CHECK(verify_info_equivariance(m, xi, b, make_pair(m, g)) < 1e-10);
  }
}

TEST_CASE("criterion value laws") {
  std::mt19937_64 rng(43);
  for (int n = 0; n < 100; ++n) {
    const auto g = random_affine(rng, 2);
    const auto lin = make_pair(vertices(), g);
    const Parameter beta = oracle::random_beta(rng, 2);
    const Design xi(oracle::square(), oracle::random_simplex(rng, 4));
    const ModelSpec target = image_model(vertices(), g);
    const Design img = design_image(xi, lin, target);
    const double dq = lin.q().determinant();
    const double d0 = d_value(design_info(vertices(), xi, beta));
    CHECK(d_value(design_info(target, img, param_transform(lin, beta))) ==
          doctest::Approx(d0 / (dq * dq)).epsilon(1e-9));

    const auto nu = WeightingMeasure::discrete(oracle::square(), oracle::random_simplex(rng, 4));
    const double i0 = imse_value(vertices(), xi, beta, nu);
    CHECK(imse_value(target, img, param_transform(lin, beta), measure_image(nu, g)) ==
          doctest::Approx(i0).epsilon(1e-9));

    // rescaled mode: d scales by c^{2p}, IMSE by c^{-2}
    const auto res = make_pair(vertices(), g, ParamMode::InterceptRescaled);
    const Parameter lin_beta = param_transform(lin, beta);
    if (lin_beta[0] <= 0) continue;
    const double c = rescale_factor(res, beta);
    CHECK(d_value(design_info(target, img, param_transform(res, beta))) ==
          doctest::Approx(d0 / (dq * dq) * std::pow(c, 6)).epsilon(1e-9));
    CHECK(imse_value(target, img, param_transform(res, beta), measure_image(nu, g)) ==
          doctest::Approx(i0 / (c * c)).epsilon(1e-9));
  }
}

TEST_CASE("composition and inverses") {
  std::mt19937_64 rng(47);
  for (int n = 0; n < 100; ++n) {
    const auto mode = n % 2 ? ParamMode::InterceptRescaled : ParamMode::Linear;
    const auto p1 = make_pair(square(), random_affine(rng, 2), mode);
    const auto p2 = make_pair(square(), random_affine(rng, 2), mode);
    const Parameter beta = oracle::random_beta(rng, 2);
    try {
      const Parameter chained = param_transform(p2, param_transform(p1, beta));
      const Parameter direct = param_transform(compose(p1, p2), beta);
      CHECK((chained - direct).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, chained.cwiseAbs().maxCoeff()));
      const Parameter back = param_transform(inverse_pair(p1), param_transform(p1, beta));
      CHECK((back - beta).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, beta.cwiseAbs().maxCoeff()) * 10);
    } catch (const DesignError& e) {
      CHECK(e.kind() == ErrorKind::RescaleUndefined);
    }
  }
  const auto g = make_pair(interval(), shift_scale(2, 4));
  const auto gi = inverse_pair(g);
  CHECK(gi.g()(vec({6}))[0] == doctest::Approx(1.0));
}

TEST_CASE("parameter region is preserved") {
  std::mt19937_64 rng(53);
  for (int n = 0; n < 100; ++n) {
    const auto g = random_affine(rng, 2);
    const Parameter beta = oracle::random_beta(rng, 2);
    const auto lin = make_pair(vertices(), g);
    const ModelSpec target = image_model(vertices(), g);
    CHECK(is_admissible(target, param_transform(lin, beta)));
  }
}

TEST_CASE("transfer of optimal designs") {
  // D, equal endpoint weights, any beta on the image region
  const Design ends({vec({0}), vec({1})}, {0.5, 0.5});
  const auto pair = make_pair(interval(), shift_scale(2, 3));
  std::mt19937_64 rng(59);
  for (int n = 0; n < 20; ++n) {
    const Parameter beta = oracle::random_beta(rng, 1);
    const auto t = transfer_optimal(interval(), ends, beta, pair, Criterion::d());
    CHECK(equivalence_check(t.model, t.design, t.beta, Criterion::d()).passed);
  }

  // endpoint-measure IMSE design carried to [a, b]: weight at a is f(b)'bt / (f(a)'bt + f(b)'bt)
  const Parameter beta = vec({1, 0.8});
  const auto ends_nu = WeightingMeasure::discrete({vec({0}), vec({1})}, {0.5, 0.5});
  const Design pb = prop1_closed_form(beta, Prop1Measure::UniformEndpoints);
  const auto t = transfer_optimal(interval(), pb, beta, pair, Criterion::imse(ends_nu));
  const double za = t.beta[0] + 2 * t.beta[1], zb = t.beta[0] + 5 * t.beta[1];
  CHECK(t.design.weight_at(vec({2})) == doctest::Approx(zb / (za + zb)).epsilon(1e-12));
  REQUIRE(t.nu.has_value());
  CHECK(equivalence_check(t.model, t.design, t.beta, Criterion::imse(*t.nu)).passed);

  const auto ident = transfer_optimal(interval(), pb, beta, make_pair(interval(), AffinePointMap::identity(1)),
                                      Criterion::imse(ends_nu));
  CHECK(ident.beta == beta);
  CHECK(ident.design.weight_at(vec({0})) == pb.weight_at(vec({0})));
}

TEST_CASE("named maps") {
  const Region r = square().region();
  CHECK(named_map("swap:1,2", r)(vec({0.2, 0.7})).isApprox(vec({0.7, 0.2})));
  CHECK(named_map("reflect:2", r)(vec({0.2, 0.7})).isApprox(vec({0.2, 0.3})));
  CHECK(named_map("identity", r)(vec({0.2, 0.7})).isApprox(vec({0.2, 0.7})));
  CHECK_THROWS_AS(named_map("rotate:1", r), DesignError);
  CHECK(parse_param_mode(to_string(ParamMode::InterceptRescaled)) == ParamMode::InterceptRescaled);
}

}  // TEST_SUITE
