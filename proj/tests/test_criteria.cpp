#include "oracles.hpp"

#include "optdesign/criteria.hpp"
#include "optdesign/error.hpp"
#include "optdesign/optimize.hpp"

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

Design endpoints(double w1) { return Design({vec({0}), vec({1})}, {1.0 - w1, w1}); }

// xi_w of the equal-slopes family: w on (0,0) and (1,1), 1/2 - w on (0,1) and (1,0)
Design xi_bar(double w) { return Design(oracle::square(), {w, 0.5 - w, 0.5 - w, w}); }

}  // namespace

TEST_SUITE("criteria") {

TEST_CASE("D-criterion values") {
  CHECK(d_value(Matrix::Identity(2, 2)) == 1.0);
  CHECK(d_value(Matrix::Ones(2, 2)) == kInfinity);
  // det M = w (1 - w) lambda(1) lambda(2) = 1/16
  const Matrix direct = oracle::info({vec({0}), vec({1})}, {0.5, 0.5}, vec({1, 1}));
  CHECK(direct.determinant() == doctest::Approx(1.0 / 16).epsilon(1e-15));
  CHECK(d_value(design_info(interval(), endpoints(0.5), vec({1, 1}))) == doctest::Approx(16.0).epsilon(1e-13));

  CHECK(d_homogeneous(Matrix::Identity(2, 2), 2) == 1.0);
  Matrix m(2, 2);
  m << 2.0, 0.3, 0.3, 1.5;
  CHECK(d_homogeneous(4.0 * m, 2) == doctest::Approx(d_homogeneous(m, 2) / 4.0).epsilon(1e-15));
  Matrix m64 = Matrix::Identity(2, 2) / 8.0;
  CHECK(d_homogeneous(m64, 2) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(d_homogeneous(Matrix::Zero(2, 2), 2) == kInfinity);
}

TEST_CASE("IMSE values") {
  const auto nu = WeightingMeasure::uniform_over(interval().region());
  CHECK(imse_value(interval(), endpoints(0.5), vec({1, 1}), nu) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(imse_value(interval(), Design({vec({0.5})}, {1.0}), vec({1, 1}), nu) == kInfinity);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.05, 0.95), c(0.2, 5.0);
  for (int n = 0; n < 50; ++n) {
    const Parameter beta = oracle::random_beta(rng, 1);
    const double w = u(rng);
    const double a = beta[0], b = beta[0] + beta[1];
    // closed form holds for any endpoint weights
    CHECK(imse_value(interval(), endpoints(w), beta, nu) ==
          doctest::Approx(oracle::imse_uniform_interval(a, b, w)).epsilon(1e-11));
    const double ct = c(rng);
    CHECK(imse_value(interval(), endpoints(w), ct * beta, nu) ==
          doctest::Approx(imse_value(interval(), endpoints(w), beta, nu) / (ct * ct)).epsilon(1e-12));
  }
}

TEST_CASE("D sensitivity") {
  const Parameter beta = vec({1, 1});
  CHECK(d_sensitivity(interval(), endpoints(0.5), beta, vec({0})) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(d_sensitivity(interval(), endpoints(0.5), beta, vec({1})) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(d_sensitivity(interval(), endpoints(0.6), beta, vec({0})) > 2.0 + 1e-3);
  CHECK_THROWS_AS(d_sensitivity(interval(), Design({vec({0.5})}, {1.0}), beta, vec({0})), DesignError);
}

TEST_CASE("IMSE sensitivity") {
  const Parameter beta = vec({1, 1});
  const auto uni = WeightingMeasure::uniform_over(interval().region());
  const Criterion ca = Criterion::imse(uni);
  const SensitivityFunction sa(interval(), endpoints(0.5), beta, ca);
  CHECK(sa(vec({0})) == doctest::Approx(sa.bound()).epsilon(1e-12));
  CHECK(sa(vec({1})) == doctest::Approx(sa.bound()).epsilon(1e-12));

  const auto ends = WeightingMeasure::discrete({vec({0}), vec({1})}, {0.5, 0.5});
  const Design pb = prop1_closed_form(beta, Prop1Measure::UniformEndpoints);
  const SensitivityFunction sb(interval(), pb, beta, Criterion::imse(ends));
  CHECK(sb(vec({0})) <= sb.bound() * (1 + 1e-9));
  CHECK(sb(vec({1})) <= sb.bound() * (1 + 1e-9));
  CHECK(imse_sensitivity(interval(), pb, beta, ends, vec({0})) == doctest::Approx(sb(vec({0}))));

  const Design perturbed({vec({0}), vec({1})}, {pb.weight_at(vec({0})) - 0.05, pb.weight_at(vec({1})) + 0.05});
  const SensitivityFunction sp(interval(), perturbed, beta, Criterion::imse(ends));
  CHECK(std::max(sp(vec({0})), sp(vec({1}))) > sp.bound() * (1 + 1e-4));
}

TEST_CASE("equivalence checks") {
  const auto pts = equivalence_points(square().region());
  CHECK(pts.size() == 4 + 101 * 101);
  const Parameter beta = vec({1, 2, 2});
  const Certificate good = equivalence_check(square(), minimal_support_design(RegionLabel::B1), beta, Criterion::d());
  CHECK(good.passed);
  CHECK(good.bound == 3.0);
  CHECK(good.max_sensitivity == doctest::Approx(3.0).epsilon(1e-9));
  const Certificate bad = equivalence_check(square(), xi_bar(0.25), beta, Criterion::d());
  CHECK_FALSE(bad.passed);
}

TEST_CASE("support sensitivities equal the bound for certified designs") {
  std::mt19937_64 rng(29);
  const auto nu = WeightingMeasure::uniform_over(square().region());
  for (int n = 0; n < 20; ++n) {
    const Parameter beta = oracle::random_beta(rng, 2);
    for (const Criterion& crit : {Criterion::d(), Criterion::imse(nu)}) {
      const auto res = local_opt_design(square(), beta, crit);
      REQUIRE(res.certificate.passed);
      const SensitivityFunction s(square(), res.design, beta, crit);
      for (const auto& x : res.design.support()) CHECK(s(x) == doctest::Approx(s.bound()).epsilon(1e-6));
    }
  }
}

TEST_CASE("efficiency") {
  const Parameter beta = vec({1, 2, 2});
  const Design opt = equal_slopes_closed_form(2.0);
  CHECK(efficiency(square(), opt, beta, Criterion::d(), opt).value == doctest::Approx(1.0).epsilon(1e-14));

  const EfficiencyReport singular = efficiency(square(), Design({vec({0, 0})}, {1.0}), beta, Criterion::d(), opt);
  CHECK(singular.singular);
  CHECK(singular.value == 0.0);

  // eff^3 = 27 w (1-2w) ((1+g)^2 + g^2 (1-2w)) / (2 (1+2g)^2) for g >= 1
  for (double g : {1.0, 1.5, 3.0, 10.0, 100.0}) {
    const Parameter b = vec({1, g, g});
    const Design ref = equal_slopes_closed_form(g);
    CHECK(design_info(square(), ref, b).determinant() ==
          doctest::Approx(std::pow(1 + g, -4) / 27.0).epsilon(1e-12));
    for (double w : {0.05, 0.2, 0.25, 0.4}) {
      const double e = efficiency(square(), xi_bar(w), b, Criterion::d(), ref).value;
      const double closed = 27 * w * (1 - 2 * w) * ((1 + g) * (1 + g) + g * g * (1 - 2 * w)) / (2 * (1 + 2 * g) * (1 + 2 * g));
      CHECK(e * e * e == doctest::Approx(closed).epsilon(1e-9));
    }
  }
  // gamma -> infinity limit of the uniform design
  const double h = 27 * 0.25 * 0.5 * 0.75 / 4;
  CHECK(std::cbrt(h) == doctest::Approx(0.8585).epsilon(1e-4));

  // any design is at most as efficient as the local optimum
  std::mt19937_64 rng(31);
  for (int n = 0; n < 50; ++n) {
    const Design xi(oracle::square(), oracle::random_simplex(rng, 4));
    CHECK(efficiency(square(), xi, beta, Criterion::d(), opt).value <= 1.0 + 1e-9);
  }
}

TEST_CASE("maximin objective") {
  const Parameter beta = vec({1, 0.5, 0.5});
  const Design opt = equal_slopes_closed_form(0.5);
  CHECK(maximin_objective(square(), opt, Criterion::d(), {beta}, {opt}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(maximin_objective(square(), Design({vec({0, 0})}, {1.0}), Criterion::d(), {beta}, {opt}) == kInfinity);

  std::vector<Parameter> params;
  std::vector<Design> optima;
  for (double g : equal_slopes_gamma_grid()) {
    params.push_back(vec({1, g, g}));
    optima.push_back(equal_slopes_closed_form(g));
  }
  const double w_star = (3 - std::sqrt(3.0)) / 6;
  CHECK(maximin_objective(square(), xi_bar(w_star), Criterion::d(), params, optima) ==
        doctest::Approx(1 / 0.8660).epsilon(2e-3));
  CHECK(maximin_objective(square(), xi_bar(0.25), Criterion::d(), params, optima) ==
        doctest::Approx(1 / 0.8585).epsilon(2e-3));
}

}  // TEST_SUITE
