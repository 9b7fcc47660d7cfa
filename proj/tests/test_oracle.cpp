#include "minball/oracle.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace minball;
using namespace minball::testing;

TEST_CASE("oracle_enumerate on analytic instances") {
  SUBCASE("single ball") {
    const CoveringBall b = oracle_enumerate(make_instance({ball({1, 2}, 3)}));
    CHECK(b.center == vec({1, 2}));
    CHECK(b.radius == 3.0);
  }
  SUBCASE("two balls") {
    const CoveringBall b = oracle_enumerate(make_instance({ball({0, 0}, 1), ball({4, 0}, 0)}));
    CHECK((b.center - vec({1.5, 0})).norm() <= 1e-12);
    CHECK(b.radius == doctest::Approx(2.5).epsilon(1e-14));
  }
  SUBCASE("limits") {
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(oracle_enumerate(random_instance(rng, 2, 13, 0.1)), Error);
    CHECK_THROWS_AS(oracle_enumerate(random_instance(rng, 5, 4, 0.1)), Error);
  }
}

TEST_CASE("oracle_subgradient on analytic instances") {
  SUBCASE("two balls") {
    const CoveringBall b = oracle_subgradient(make_instance({ball({0, 0}, 1), ball({4, 0}, 0)}),
                                              1000000);
    CHECK(std::abs(b.radius - 2.5) <= 1e-4);
  }
  SUBCASE("equilateral triangle") {
    const Instance inst =
        make_instance({ball({0, 0}, 0), ball({2, 0}, 0), ball({1, std::sqrt(3.0)}, 0)});
    const CoveringBall b = oracle_subgradient(inst, 1000000);
    CHECK(std::abs(b.radius - 2 / std::sqrt(3.0)) <= 1e-4);
  }
}

TEST_CASE("the two oracles agree") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance inst = random_instance(rng, 1 + trial % 3, 2 + trial % 9, 0.5);
    const CoveringBall e = oracle_enumerate(inst);
    const CoveringBall s = oracle_subgradient(inst, 100000, trial);
    CHECK(std::abs(e.radius - s.radius) <= 1e-3);
    CHECK(validate(inst, e).accepted);
  }
  SUBCASE("n = 3, m = 8 at full length") {
    const Instance inst = random_instance(rng, 3, 8, 0.4);
    CHECK(std::abs(oracle_enumerate(inst).radius - oracle_subgradient(inst, 1000000).radius) <=
          1e-4);
  }
}

TEST_CASE("simplex_least_squares") {
  SUBCASE("opposite vectors balance") {
    Mat G(2, 2);
    G << 1, -1, 0, 0;
    double res = 1.0;
    const Vec l = simplex_least_squares(G, &res);
    CHECK(res <= 1e-15);
    CHECK(l[0] == doctest::Approx(0.5));
  }
  SUBCASE("same-side vectors pick the shorter one") {
    Mat G(2, 2);
    G << 1, 3, 1, 0;
    double res = 0.0;
    const Vec l = simplex_least_squares(G, &res);
    // The nearest point of the segment from (1,1) to (3,0) to the origin.
    const Vec a = vec({1, 1}), b = vec({3, 0});
    const double t = std::clamp(-a.dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
    CHECK(res == doctest::Approx((a + t * (b - a)).norm()));
    CHECK(l.sum() == doctest::Approx(1.0));
    CHECK(l.minCoeff() >= 0.0);
  }
}

TEST_CASE("validate") {
  const Instance two = make_instance({ball({0, 0}, 1), ball({4, 0}, 0)});
  SUBCASE("optimal two-ball solution") {
    const Certificate c = validate(two, {vec({1.5, 0}), 2.5});
    CHECK(c.accepted);
    CHECK(c.feasibility_margin >= -1e-12);
    CHECK(c.kkt_residual <= 1e-10);
    CHECK(c.support == ActiveSet{0, 1});
  }
  SUBCASE("a perturbed center is rejected") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      Vec d = random_vec(rng, 2);
      d *= 1e-3 / d.norm();
      const Vec x = vec({1.5, 0}) + d;
      const double z = std::max(coverage_value(x, two.balls[0]), coverage_value(x, two.balls[1]));
      const Certificate c = validate(two, {x, z});
      CHECK(c.kkt_residual > 1e-4);
      CHECK_FALSE(c.accepted);
    }
  }
  SUBCASE("a radius that is too small is infeasible") {
    const Certificate c = validate(two, {vec({1.5, 0}), 2.4});
    CHECK(c.feasibility_margin == doctest::Approx(-0.1));
    CHECK_FALSE(c.accepted);
  }
  SUBCASE("margin grows with z") {
    std::mt19937_64 rng(6);
    const Instance inst = random_instance(rng, 3, 10, 0.4);
    const Vec x = random_vec(rng, 3);
    double prev = -1e300;
    for (double z = 0.5; z <= 4.0; z += 0.25) {
      const double m = validate(inst, {x, z}).feasibility_margin;
      CHECK(m > prev);
      prev = m;
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(validate(two, {vec({1, 0, 0}), 3.0}), DimensionError);
  }
}
