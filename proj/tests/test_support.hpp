#pragma once

#include "minball/geometry.hpp"
#include "minball/types.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace minball::testing {

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

inline Ball ball(std::initializer_list<double> c, double r) { return Ball{vec(c), r}; }

inline Instance make_instance(std::vector<Ball> balls) {
  Instance inst;
  inst.dim = static_cast<int>(balls.front().center.size());
  inst.balls = std::move(balls);
  return inst;
}

inline Vec random_vec(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (int k = 0; k < n; ++k) v[k] = u(rng);
  return v;
}

// Centers uniform in the cube, radii uniform in [0, rmax], nested balls
// redrawn so the result already satisfies the non-containment assumption.
inline Instance random_instance(std::mt19937_64& rng, int n, int m, double rmax) {
  std::uniform_real_distribution<double> ur(0.0, 1.0);
  Instance inst;
  inst.dim = n;
  while (static_cast<int>(inst.balls.size()) < m) {
    Ball b{random_vec(rng, n), rmax * ur(rng)};
    bool ok = true;
    for (const Ball& o : inst.balls) {
      const double d = (b.center - o.center).norm();
      if (b.radius >= d + o.radius || o.radius >= d + b.radius) ok = false;
    }
    if (ok) inst.balls.push_back(b);
  }
  return inst;
}

// Points on the unit sphere of an affine k−1 dimensional slice, radii zero,
// plus optional interior points: every optimum is degenerate.
inline Instance cocircular_instance(std::mt19937_64& rng, int n, int k, int extra) {
  std::normal_distribution<double> g(0.0, 1.0);
  Instance inst;
  inst.dim = n;
  const int span = std::min(n, k - 1);
  for (int i = 0; i < k; ++i) {
    Vec v = Vec::Zero(n);
    for (int d = 0; d < span; ++d) v[d] = g(rng);
    v /= v.norm();
    inst.balls.push_back({v, 0.0});
  }
  for (int i = 0; i < extra; ++i) inst.balls.push_back({0.3 * random_vec(rng, n), 0.0});
  return inst;
}

// Dense scan for sign changes and near-zero minima of f on [lo, hi].
inline std::vector<double> scan_roots(const std::function<double(double)>& f, double lo,
                                      double hi, int samples, double zero_tol) {
  std::vector<double> roots;
  double prev_x = lo, prev = f(lo);
  for (int i = 1; i <= samples; ++i) {
    const double x = lo + (hi - lo) * i / samples;
    const double v = f(x);
    if (std::isfinite(prev) && std::isfinite(v) && ((prev < 0) != (v < 0))) {
      double a = prev_x, b = x, fa = prev;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fa < 0) == (fm < 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    } else if (std::abs(v) <= zero_tol) {
      roots.push_back(x);
    }
    prev_x = x;
    prev = v;
  }
  return roots;
}

inline double max_relative(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

}  // namespace minball::testing
