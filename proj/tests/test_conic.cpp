#include "minball/conic.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace minball;
using namespace minball::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Unit vector orthogonal to the axis and to every fold normal.
Vec random_in_plane_direction(std::mt19937_64& rng, const ConicSection& c) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec u = random_vec(rng, static_cast<int>(c.axis.size()));
    u -= u.dot(c.axis) * c.axis;
    for (const Vec& h : c.normals) u -= u.dot(h) * h;
    if (u.norm() > 1e-3) return u.normalized();
  }
  return Vec();
}

// Largest pairwise coverage mismatch of a point against the first member.
double membership_error(const Instance& inst, const ActiveSet& S, const Vec& y) {
  const double f1 = coverage_value(y, inst.balls[S[0]]);
  double worst = 0.0;
  for (int i : S) worst = std::max(worst, std::abs(coverage_value(y, inst.balls[i]) - f1));
  return worst / (1.0 + f1);
}

double curve_limit(const ConicSection& c) {
  switch (c.kind) {
    case ConicKind::hyperboloid:
      return 1.4;  // inside (−π/2, π/2)
    case ConicKind::ellipsoid:
      return kPi;
    default:
      return 3.0;
  }
}

}  // namespace

TEST_CASE("bisector of unequal radii") {
  const Bisector b = build_bisector(ball({0, 0}, 2), ball({6, 0}, 0));
  REQUIRE(b.kind == Bisector::Kind::hyperboloid_sheet);
  CHECK(b.center[0] == doctest::Approx(3.0));
  CHECK(b.center[1] == doctest::Approx(0.0));
  CHECK(b.axis[0] == doctest::Approx(-1.0));
  CHECK(b.axis[1] == doctest::Approx(0.0));
  CHECK(b.a == doctest::Approx(1.0));
  CHECK(b.c_param == doctest::Approx(3.0));
  CHECK(b.eps == doctest::Approx(3.0));
  CHECK(b.vertex[0] == doctest::Approx(2.0));
  CHECK(b.vertex[1] == doctest::Approx(0.0));
  CHECK(b.b2 == doctest::Approx(8.0));
  // Tangency at the vertex: ‖(2,0)‖ + 2 = 4 = ‖(2,0) − (6,0)‖.
  CHECK(coverage_value(b.vertex, ball({0, 0}, 2)) == doctest::Approx(4.0));
  CHECK(coverage_value(b.vertex, ball({6, 0}, 0)) == doctest::Approx(4.0));
}

TEST_CASE("bisector of equal radii is the midplane") {
  const Bisector b = build_bisector(ball({0, 0}, 1), ball({2, 0}, 1));
  REQUIRE(b.kind == Bisector::Kind::hyperplane);
  CHECK(std::abs(b.normal[0]) == doctest::Approx(1.0));
  CHECK(b.normal.dot(b.point) / b.normal[0] == doctest::Approx(1.0));
}

TEST_CASE("bisector construction rejects contained pairs") {
  CHECK_THROWS_AS(build_bisector(ball({0, 0}, 3), ball({1, 0}, 1)), AssumptionError);
}

TEST_CASE("quadratic form residual") {
  const Bisector b = build_bisector(ball({0, 0}, 2), ball({6, 0}, 0));
  CHECK(quadratic_form_residual(b, vec({2, 0})) == doctest::Approx(0.0));
  CHECK(quadratic_form_residual(b, vec({3, 0})) == doctest::Approx(8.0));

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Ball p{random_vec(rng, 3), 0.6}, q{random_vec(rng, 3, 2, 3), 0.1};
    const Bisector s = build_bisector(p, q);
    // The residual changes sign when a sheet point is pushed along the axis.
    const double delta = 1e-3;
    const double inside = quadratic_form_residual(s, s.vertex - delta * s.axis);
    const double outside = quadratic_form_residual(s, s.vertex + delta * s.axis);
    CHECK(inside * outside < 0.0);
  }
}

TEST_CASE("sampled sheet points satisfy the bisector equation") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ur(0.0, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = random_instance(rng, 4, 2, 0.8);
    if (radii_equal(inst.balls[0].radius, inst.balls[1].radius)) continue;
    ActiveSet S{0, 1};
    sort_by_radius(inst, S);
    const ConicSection c = intersect_sequence(inst, S);
    const Bisector b = build_bisector(inst.balls[0], inst.balls[1]);
    // s = 2 passes the bisector through unchanged.
    CHECK(c.kind == ConicKind::hyperboloid);
    CHECK((c.center - b.center).norm() <= 1e-12);
    CHECK((c.axis - b.axis).norm() <= 1e-12);
    CHECK(std::abs(c.a - b.a) <= 1e-12);
    CHECK(std::abs(c.eps - b.eps) <= 1e-12);
    CHECK(std::abs(c.b * c.b - b.b2) <= 1e-12);
    const PlaneCurve curve = parametrize_2d(c, random_in_plane_direction(rng, c));
    for (int i = 0; i < 100; ++i) {
      const double beta = -1.4 + 2.8 * i / 99.0;
      const Vec y = curve.point(beta);
      const double diff = coverage_value(y, inst.balls[0]) - coverage_value(y, inst.balls[1]);
      CHECK(std::abs(diff) <= 1e-8 * (1.0 + y.norm()));
    }
  }
}

TEST_CASE("pair hyperplane branches") {
  SUBCASE("r1 = r2 > r3 uses the midplane of p1 and p2") {
    const PairHyperplane h =
        build_pair_hyperplane({ball({0, 0}, 2), ball({2, 0}, 2), ball({1, 3}, 0)});
    CHECK(h.branch == 1);
    CHECK(h.normal[0] == doctest::Approx(-1.0));
    CHECK(h.normal[1] == doctest::Approx(0.0));
    CHECK(h.offset(vec({1, 0})) == doctest::Approx(0.0));
    CHECK(h.offset(vec({1, 7})) == doctest::Approx(0.0));
  }
  SUBCASE("r1 > r2 = r3 uses the midplane of p2 and p3") {
    const PairHyperplane h =
        build_pair_hyperplane({ball({0, 0}, 2), ball({4, 0}, 0), ball({0, 4}, 0)});
    CHECK(h.branch == 2);
    CHECK(h.normal[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(h.normal[1] == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(h.offset(vec({2, 2})) == doctest::Approx(0.0));
  }
  SUBCASE("all radii equal is rejected") {
    CHECK_THROWS_AS(build_pair_hyperplane({ball({0, 0}, 1), ball({4, 0}, 1), ball({0, 4}, 1)}),
                    Error);
  }
}

TEST_CASE("strict radii: the pair plane contains the common points of two sheets") {
  // Dense scan along B_{12} for zeros of f1 − f3, then check the plane.
  std::mt19937_64 rng(23);
  int found = 0;
  for (int trial = 0; trial < 200 && found < 60; ++trial) {
    const int n = trial % 2 == 0 ? 2 : 3;
    Instance inst;
    inst.dim = n;
    inst.balls = {{random_vec(rng, n), 0.9}, {random_vec(rng, n), 0.5}, {random_vec(rng, n), 0.1}};
    if (!satisfies_assumption(inst)) continue;
    const PairHyperplane h = build_pair_hyperplane({inst.balls[0], inst.balls[1], inst.balls[2]});
    CHECK(h.branch == 3);
    const ConicSection sheet = intersect_sequence(inst, {0, 1});
    const Vec u = random_in_plane_direction(rng, sheet);
    if (u.size() == 0) continue;
    const PlaneCurve curve = parametrize_2d(sheet, u);
    auto g = [&](double beta) {
      const Vec y = curve.point(beta);
      return coverage_value(y, inst.balls[0]) - coverage_value(y, inst.balls[2]);
    };
    for (double beta : scan_roots(g, -1.5, 1.5, 20000, 0.0)) {
      const Vec y = curve.point(beta);
      CHECK(std::abs(h.offset(y)) <= 1e-6 * (1.0 + y.norm()));
      ++found;
    }
  }
  CHECK(found > 20);
}

TEST_CASE("intersect_sequence membership for s = 3") {
  SUBCASE("in the plane the section reduces to its vertex") {
    const Instance inst = make_instance({ball({0, 0}, 2), ball({3, 1}, 1), ball({1, 4}, 0)});
    const ConicSection c = intersect_sequence(inst, {0, 1, 2});
    CHECK(c.dim == 1);
    CHECK(membership_error(inst, {0, 1, 2}, c.vertex) <= 1e-9);
  }
  SUBCASE("sampled points in R^3") {
    std::mt19937_64 rng(99);
    int done = 0;
    for (int trial = 0; trial < 100 && done < 30; ++trial) {
      Instance inst;
      inst.dim = 3;
      inst.balls = {{random_vec(rng, 3), 0.8}, {random_vec(rng, 3), 0.4}, {random_vec(rng, 3), 0.0}};
      if (!satisfies_assumption(inst)) continue;
      ConicSection c;
      try {
        c = intersect_sequence(inst, {0, 1, 2});
      } catch (const EmptyIntersectionError&) {
        continue;
      }
      ++done;
      const PlaneCurve curve = parametrize_2d(c, random_in_plane_direction(rng, c));
      const double lim = curve_limit(c);
      for (int i = 0; i < 50; ++i) {
        const Vec y = curve.point(-lim + 2 * lim * i / 49.0);
        CHECK(membership_error(inst, {0, 1, 2}, y) <= 1e-7);
      }
    }
    CHECK(done >= 20);
  }
}

TEST_CASE("an ellipsoid section appears when the fold is steep") {
  std::mt19937_64 rng(7);
  int ellipses = 0;
  for (int trial = 0; trial < 2000 && ellipses < 10; ++trial) {
    Instance inst;
    inst.dim = 3;
    inst.balls = {{random_vec(rng, 3), 1.0}, {random_vec(rng, 3), 0.6}, {random_vec(rng, 3), 0.0}};
    if (!satisfies_assumption(inst)) continue;
    ConicSection c;
    try {
      c = intersect_sequence(inst, {0, 1, 2});
    } catch (const EmptyIntersectionError&) {
      continue;
    }
    if (c.kind != ConicKind::ellipsoid) continue;
    ++ellipses;
    CHECK(c.eps < 1.0);
    CHECK(c.b * c.b == doctest::Approx(c.a * c.a * (1.0 - c.eps * c.eps)));
    const PlaneCurve curve = parametrize_2d(c, random_in_plane_direction(rng, c));
    CHECK((curve.point(0.0) - c.vertex).norm() <= 1e-12);
    CHECK((curve.point(kPi) - (c.center - c.a * c.axis)).norm() <= 1e-9);
    for (int i = 0; i < 40; ++i) {
      const Vec y = curve.point(-kPi + 2 * kPi * i / 39.0);
      CHECK(membership_error(inst, {0, 1, 2}, y) <= 1e-7);
      CHECK(std::abs(quadratic_form_residual(c, y)) <= 1e-8 * (1.0 + y.squaredNorm()));
    }
  }
  CHECK(ellipses >= 5);
}

TEST_CASE("a paraboloid section appears when the folded eccentricity is one") {
  // Slide the middle ball along a line until ε·ρ crosses 1, then pin the
  // crossing by bisection.
  const Ball b1{Vec::Zero(3), 1.0};
  const Ball b3{(Vec(3) << 3.0, 0.0, 0.0).finished(), 0.0};
  auto ball2 = [](double t) {
    return Ball{(Vec(3) << -1.0, t, 0.2).finished(), 0.5};
  };
  auto excess = [&](double t) {
    Instance inst;
    inst.dim = 3;
    inst.balls = {b1, ball2(t), b3};
    const PairHyperplane h = pair_hyperplane_for(inst, 0, 1, 2);
    const Bisector sheet = build_bisector(b1, b3);
    const double hv = h.normal.dot(sheet.axis);
    return sheet.eps * std::sqrt(std::max(0.0, 1.0 - hv * hv)) - 1.0;
  };
  double lo = 0.25, hi = 1.25;
  REQUIRE((excess(lo) < 0) != (excess(hi) < 0));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((excess(mid) < 0) == (excess(lo) < 0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Instance inst;
  inst.dim = 3;
  inst.balls = {b1, ball2(0.5 * (lo + hi)), b3};
  const ConicSection c = intersect_sequence(inst, {0, 1, 2});
  REQUIRE(c.kind == ConicKind::paraboloid);
  std::mt19937_64 rng(1);
  const PlaneCurve curve = parametrize_2d(c, random_in_plane_direction(rng, c));
  CHECK((curve.point(0.0) - c.center).norm() <= 1e-12);
  for (int i = 0; i < 40; ++i) {
    const Vec y = curve.point(-2.0 + 4.0 * i / 39.0);
    CHECK(membership_error(inst, {0, 1, 2}, y) <= 1e-7);
    CHECK(std::abs(paraboloid_residual(c, y)) <= 1e-7 * (1.0 + y.squaredNorm()));
  }
}

TEST_CASE("fold normals stay orthonormal and eccentricity never grows") {
  std::mt19937_64 rng(42);
  int done = 0;
  for (int trial = 0; trial < 300 && done < 40; ++trial) {
    const int n = 6;
    const int s = 5;
    Instance inst = random_instance(rng, n, s, 1.0);
    ActiveSet S(s);
    for (int i = 0; i < s; ++i) S[i] = i;
    sort_by_radius(inst, S);
    if (radii_equal(inst.balls[S.front()].radius, inst.balls[S.back()].radius)) continue;
    ConicSection c;
    try {
      c = intersect_sequence(inst, S);
    } catch (const EmptyIntersectionError&) {
      continue;
    } catch (const ChainedParaboloidError&) {
      continue;
    }
    ++done;
    const Bisector first = build_bisector(inst.balls[S.front()], inst.balls[S.back()]);
    CHECK(c.eps <= first.eps + 1e-12);
    for (std::size_t i = 0; i < c.normals.size(); ++i) {
      for (std::size_t j = 0; j < c.normals.size(); ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        CHECK(std::abs(c.normals[i].dot(c.normals[j]) - expected) <= 1e-10);
      }
      CHECK(std::abs(c.normals[i].dot(c.axis)) <= 1e-10);
    }
    CHECK(c.dim == n - s + 2);
  }
  CHECK(done >= 20);
}

TEST_CASE("hyperplane-conic classification thresholds") {
  ConicSection hyp;
  hyp.kind = ConicKind::hyperboloid;
  hyp.center = Vec::Zero(3);
  hyp.axis = vec({1, 0, 0});
  hyp.eps = 3.0;
  hyp.a = 1.0;
  hyp.b = std::sqrt(8.0);
  hyp.vertex = hyp.center + hyp.axis;
  hyp.dim = 3;
  SUBCASE("normal orthogonal to the axis keeps a hyperboloid") {
    const auto f = classify_hyperplane_conic(hyp, vec({0, 1, 0}), Vec::Zero(3));
    CHECK(f.rho == doctest::Approx(1.0));
    CHECK(f.kind == FoldClassification::Kind::hyperboloid);
  }
  SUBCASE("normal along the axis gives an ellipsoid or nothing") {
    const auto f = classify_hyperplane_conic(hyp, vec({1, 0, 0}), vec({2, 0, 0}));
    CHECK(f.rho == doctest::Approx(0.0));
    CHECK((f.kind == FoldClassification::Kind::ellipsoid ||
           f.kind == FoldClassification::Kind::empty));
  }
  SUBCASE("eps rho = 1 gives a paraboloid") {
    hyp.eps = 2.0;
    hyp.b = std::sqrt(3.0);
    const double s = std::sqrt(0.75);
    const auto f = classify_hyperplane_conic(hyp, vec({s, 0.5, 0}), Vec::Zero(3));
    CHECK(f.rho == doctest::Approx(0.5));
    CHECK(f.kind == FoldClassification::Kind::paraboloid);
  }
}

TEST_CASE("parametrize_2d validates u") {
  ConicSection c;
  c.kind = ConicKind::hyperboloid;
  c.center = Vec::Zero(2);
  c.axis = vec({1, 0});
  c.eps = 2;
  c.a = 1;
  c.b = std::sqrt(3.0);
  c.vertex = vec({1, 0});
  c.dim = 2;
  CHECK_THROWS_AS(parametrize_2d(c, vec({1, 0})), Error);
  CHECK_THROWS_AS(parametrize_2d(c, vec({0, 2})), Error);
  const PlaneCurve curve = parametrize_2d(c, vec({0, 1}));
  CHECK((curve.point(0.0) - c.vertex).norm() <= 1e-15);
}

TEST_CASE("solve_sec_tan examples") {
  SUBCASE("sec beta = 2") {
    const auto r = solve_sec_tan(1, 0, 2);
    REQUIRE(r.roots.size() == 2);
    std::vector<double> b{r.roots[0].beta, r.roots[1].beta};
    std::sort(b.begin(), b.end());
    CHECK(b[0] == doctest::Approx(-kPi / 3));
    CHECK(b[1] == doctest::Approx(kPi / 3));
    CHECK(r.roots[0].valid);
    CHECK(r.roots[1].valid);
  }
  SUBCASE("no solution") { CHECK(solve_sec_tan(2, 0, 1).roots.empty()); }
}

TEST_CASE("solve_cos_sin examples") {
  SUBCASE("sin beta = 1") {
    const auto r = solve_cos_sin(0, 1, 1);
    REQUIRE(!r.roots.empty());
    for (const auto& root : r.roots) CHECK(root.beta == doctest::Approx(kPi / 2));
  }
  SUBCASE("no solution") { CHECK(solve_cos_sin(1, 1, 2).roots.empty()); }
}

TEST_CASE("solve_parabola_quadratic examples") {
  SUBCASE("two roots ascending") {
    const auto r = solve_parabola_quadratic(1, 0, 4);
    REQUIRE(r.roots.size() == 2);
    CHECK(r.roots[0].beta == doctest::Approx(-2.0));
    CHECK(r.roots[1].beta == doctest::Approx(2.0));
  }
  SUBCASE("linear degeneration") {
    const auto r = solve_parabola_quadratic(0, 2, 4);
    REQUIRE(r.roots.size() == 1);
    CHECK(r.roots[0].beta == doctest::Approx(2.0));
  }
  SUBCASE("inconsistent") { CHECK(solve_parabola_quadratic(0, 0, 1).roots.empty()); }
}

TEST_CASE("scalar solvers agree with a dense scan") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double A = u(rng), B = u(rng), C = u(rng);
    {
      auto f = [&](double b) { return A / std::cos(b) + B * std::tan(b) - C; };
      const auto r = solve_sec_tan(A, B, C);
      for (const auto& root : r.roots) {
        // Roots on the other branch (sec < 0) solve the equation as a
        // (tan, sec) pair only.
        CHECK(std::abs(A * root.second + B * root.first - C) <= 1e-9 * (1 + std::abs(C)));
        if (root.valid) CHECK(std::abs(f(root.beta)) <= 1e-9 * (1 + std::abs(C)));
      }
      const auto scan = scan_roots(f, -kPi / 2 + 1e-6, kPi / 2 - 1e-6, 100000, 0.0);
      for (double s : scan) {
        const bool hit = std::any_of(r.roots.begin(), r.roots.end(), [&](const ScalarRoot& x) {
          return x.valid && std::abs(x.beta - s) < 1e-6;
        });
        CHECK(hit);
      }
    }
    {
      auto f = [&](double b) { return A * std::cos(b) + B * std::sin(b) - C; };
      const auto r = solve_cos_sin(A, B, C);
      for (const auto& root : r.roots) CHECK(std::abs(f(root.beta)) <= 1e-9 * (1 + std::abs(C)));
      const auto scan = scan_roots(f, -kPi + 1e-9, kPi, 100000, 0.0);
      for (double s : scan) {
        const bool hit = std::any_of(r.roots.begin(), r.roots.end(),
                                     [&](const ScalarRoot& x) { return std::abs(x.beta - s) < 1e-6; });
        CHECK(hit);
      }
    }
    {
      auto f = [&](double b) { return A * b * b + B * b - C; };
      const auto r = solve_parabola_quadratic(A, B, C);
      for (const auto& root : r.roots) CHECK(std::abs(f(root.beta)) <= 1e-9 * (1 + std::abs(C)));
      for (std::size_t i = 1; i < r.roots.size(); ++i) CHECK(r.roots[i - 1].beta <= r.roots[i].beta);
    }
  }
}
