#include "oracles.hpp"

#include "optdesign/error.hpp"
#include "optdesign/io.hpp"

#include <doctest.h>

using namespace optdesign;
using oracle::vec;

TEST_SUITE("io") {

TEST_CASE("model JSON") {
  const Json j = Json::parse(R"({"dim_x":2,"basis":"additive","region":{"lower":[0,0],"upper":[1,1]},"kappa":2.0})");
  const ModelSpec m = model_from_json(j);
  CHECK(m.p() == 3);
  CHECK(m.intensity().kappa() == 2.0);
  const ModelSpec back = model_from_json(model_to_json(m));
  CHECK(back.region().upper() == m.region().upper());

  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"basis":"spline","region":{"lower":[0],"upper":[1]}})")), DesignError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"dim_x":2,"region":{"lower":[0],"upper":[1]}})")), DesignError);
  const ModelSpec fin = model_from_json(Json::parse(R"({"region":{"points":[[0],[0.5],[1]]}})"));
  CHECK_FALSE(fin.region().is_box());
}

TEST_CASE("design JSON round trip is exact") {
  std::mt19937_64 rng(79);
  for (int n = 0; n < 50; ++n) {
    const auto w = oracle::random_simplex(rng, 4);
    const Design xi(oracle::square(), w);
    const Design back = design_from_json(Json::parse(design_to_json(xi).dump()));
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(back.weight(i) == xi.weight(i));
      CHECK(back.point(i) == xi.point(i));
    }
  }
  const Design d = design_from_json(Json::parse(R"({"support":[[0.0],[1.0]],"weights":[0.5,0.5]})"));
  CHECK(d.weight(1) == 0.5);
  CHECK_THROWS_AS(design_from_json(Json::parse(R"({"support":[[0.0],[1.0]],"weights":[0.5,0.6]})")), DesignError);
}

TEST_CASE("criterion and transform JSON") {
  const ModelSpec m = ModelSpec::first_order(Region::box(Vector::Zero(1), Vector::Ones(1)));
  CHECK(criterion_from_json(Json::parse(R"({"kind":"D"})"), m).is_d());
  const Criterion c = criterion_from_json(
      Json::parse(R"({"kind":"IMSE","nu":{"kind":"discrete","points":[[0],[1]],"weights":[0.5,0.5]}})"), m);
  CHECK_FALSE(c.is_d());
  CHECK(c.measure().points().size() == 2);
  CHECK(criterion_from_json(Json::parse(R"({"nu":{"kind":"uniform"}})"), m).measure().is_uniform());
  CHECK(criterion_from_json(criterion_to_json(c), m).measure().weights() == c.measure().weights());

  const auto t = transform_from_json(Json::parse(R"({"a":[[-1]],"b":[1],"param_mode":"intercept_rescaled"})"), m);
  CHECK(t.mode() == ParamMode::InterceptRescaled);
  CHECK(param_transform(t, vec({1, 1})).isApprox(vec({1, -0.5})));
  CHECK(transform_from_json(Json("reflect:1"), m).g().b()[0] == 1.0);

  const ModelSpec sq = ModelSpec::first_order(Region::box(Vector::Zero(2), Vector::Ones(2)));
  const auto gens = generators_from_json(
      Json::parse(R"({"generators":["reflect:1","swap:1,2"],"param_mode":"intercept_rescaled"})"), sq);
  CHECK(gens.size() == 2);
  CHECK(generate_group(sq, gens).size() == 8);
}

TEST_CASE("parameter parsing") {
  CHECK(parse_beta("1,3,3") == vec({1, 3, 3}));
  CHECK(parse_beta("1, -3/7, -3/7").isApprox(vec({1, -3.0 / 7, -3.0 / 7}), 0));
  CHECK(parse_beta("[1, 2]") == vec({1, 2}));
  CHECK(parse_beta("[1, -3/7]")[1] == -3.0 / 7);
  CHECK(parse_beta("1 2.5e-1") == vec({1, 0.25}));
  CHECK_THROWS_AS(parse_beta("1,x"), DesignError);
  CHECK_THROWS_AS(parse_beta("1/0"), DesignError);
  CHECK_THROWS_AS(parse_beta(""), DesignError);
}

TEST_CASE("result JSON and table formatting") {
  OptimizationResult r;
  r.design = Design({vec({0}), vec({1})}, {0.5, 0.5});
  r.criterion_value = 64;
  r.certificate.max_sensitivity = 2;
  r.certificate.bound = 2;
  r.certificate.argmax = vec({0});
  r.iterations = 3;
  const Json j = result_to_json(r);
  CHECK(j["certificate"]["bound"] == 2.0);
  CHECK(j["iterations"] == 3);
  CHECK(design_from_json(j["design"]).weight(0) == 0.5);

  CHECK(format_weight(0.3819942) == "0.382");
  CHECK(format_weight(4.9e-4) == "0.000");
  CHECK(format_weight(0.0) == "0.000");
  CHECK(format_weight(0.25) == "0.250");
}

}  // TEST_SUITE
