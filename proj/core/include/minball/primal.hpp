#pragma once

#include "minball/solver.hpp"

namespace minball {

// Primal feasible iterate: every ball is covered and the balls of S are
// tight.  z never increases.
struct PrimalState {
  ActiveSet S;
  Vec x;
  double z = 0.0;
  int iteration = 0;
  int zero_steps = 0;
  bool optimal = false;
  Vec weights;
  std::vector<TraceEntry> trace;
};

PrimalState primal_initialize(const Instance& inst, const std::optional<Vec>& x0,
                              const Tolerances& tol = {});

// Ray towards aff(S) for an active set with equal radii; the domain is α̂_S.
SearchPath primal_ray_path(const Instance& inst, const PrimalState& state,
                           const Tolerances& tol = {});

Step primal_ray_entering_step(const Instance& inst, const PrimalState& state,
                              const SearchPath& path, int k, const Tolerances& tol = {});

// Branch of the planar section of B_S ending at the vertex a_S; the domain
// is −β_S.
SearchPath primal_conic_path(const Instance& inst, const PrimalState& state,
                             const Tolerances& tol = {});

Step primal_conic_entering_step(const Instance& inst, const PrimalState& state,
                                const SearchPath& path, int k, const Tolerances& tol = {});

// One search step followed by the update phase.
StepEvent primal_iterate(const Instance& inst, PrimalState& state, const Tolerances& tol = {},
                         bool trace = true);

// Preprocesses the instance, runs the primal method and reports indices
// into the original instance.  Throws IterationLimitError carrying the best
// upper bound when the cap is hit.
SolveResult primal_solve(const Instance& inst, const SolveOptions& opt = {});

}  // namespace minball
