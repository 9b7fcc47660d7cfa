#pragma once

#include "minball/solver.hpp"

namespace minball {

// Dual feasible iterate: x lies in conv(S) and the balls of S are tight, so
// z is a lower bound on the optimum.  z never decreases.
struct DualState {
  ActiveSet S;
  Vec x;
  double z = 0.0;
  Vec pi;  // barycentric coordinates of x over S
  int entering = -1;
  int iteration = 0;
  bool optimal = false;
  std::vector<TraceEntry> trace;
};

// Pair maximizing ‖p_j − p_k‖ + r_j + r_k (sampled rows above 2000 balls).
std::pair<int, int> dual_default_pair(const Instance& inst);

DualState dual_initialize(const Instance& inst, const std::optional<std::pair<int, int>>& pair,
                          const Tolerances& tol = {});

struct OptimalityCheck {
  bool optimal;
  int entering;      // most violated ball, smallest index on ties
  double violation;  // coverage excess of that ball
};

OptimalityCheck dual_optimality_check(const Instance& inst, const DualState& state,
                                      const Tolerances& tol = {});

struct AffineUpdate {
  bool dependent = false;
  Vec lambda;       // solution of the dependency system, λ = −μ
  int leaving = -1; // ball index dropped by the minimum ratio rule
};

// Drops one member of S when p_e lies in aff(S), keeping x ∈ conv(S ∪ {e}).
AffineUpdate dual_affine_update(const Instance& inst, DualState& state, int e,
                                const Tolerances& tol = {});

struct DualStep {
  SearchPath path;
  Step alpha = Step::unbounded();  // α′, where ball e becomes tight
};

DualStep dual_ray_path_and_step(const Instance& inst, const DualState& state, int e,
                                const Tolerances& tol = {});

DualStep dual_conic_path_and_step(const Instance& inst, const DualState& state, int e,
                                  const Tolerances& tol = {});

// π(α) = γ − (path terms)·δ/ξ for the simplex conv(S ∪ {e}).
struct FacetExitSystem {
  Mat T;
  Vec gamma;
  Vec delta;
  Vec xi;
  double residual = 0.0;

  Vec pi(const SearchPath& path, double alpha) const;
};

FacetExitSystem build_facet_exit_system(const Instance& inst, const ActiveSet& S, int e,
                                        const SearchPath& path, const Tolerances& tol = {});

struct FacetExit {
  bool accepted = false;
  double alpha = 0.0;
  int leaving = -1;  // ball index leaving S on a facet exit
  Vec pi;            // weights over S ∪ {e} at the chosen point
};

FacetExit dual_facet_exit(const Instance& inst, const DualState& state, const SearchPath& path,
                          int e, const Step& alpha_prime, const Tolerances& tol = {});

// Optimality check, affine update and one search walk.
StepEvent dual_iterate(const Instance& inst, DualState& state, const Tolerances& tol = {},
                       bool trace = true, int iteration_cap = 1 << 30);

SolveResult dual_solve(const Instance& inst, const SolveOptions& opt = {});

}  // namespace minball
