#pragma once

#include "minball/types.hpp"

#include <cstdint>

namespace minball {

struct Certificate {
  double feasibility_margin = 0.0;  // min_i z − coverage_value(x, i)
  double kkt_residual = 0.0;
  ActiveSet support;
  Vec barycentric;  // convex weights over the support
  bool accepted = false;
};

// Checks a claimed optimum.  With an empty S the support is taken to be the
// balls that are tight at (x, z).
Certificate validate(const Instance& inst, const CoveringBall& candidate, const ActiveSet& S = {},
                     const Tolerances& tol = {});

// Subgradient descent on max_i ‖x − p_i‖ + r_i with steps c₀/√t; returns the
// best iterate.  The seed jitters the starting point.
CoveringBall oracle_subgradient(const Instance& inst, long iters, std::uint64_t seed = 0);

// Exhaustive search over supports of size ≤ n+1 (m ≤ 12, n ≤ 4).
CoveringBall oracle_enumerate(const Instance& inst);

// Minimises ‖Σλ_i g_i‖ over the simplex (Wolfe minimum-norm point).
Vec simplex_least_squares(const Mat& G, double* residual = nullptr);

}  // namespace minball
