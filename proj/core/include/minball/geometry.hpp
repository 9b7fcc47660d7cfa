#pragma once

#include "minball/types.hpp"

#include <vector>

namespace minball {

// ‖x − p‖ + r.
double coverage_value(const Vec& x, const Ball& ball);

// max_i coverage_value(x, ball_i) and the smallest index attaining it.
struct MaxCoverage {
  double value;
  int index;
};
MaxCoverage max_coverage(const Instance& inst, const Vec& x);

bool radii_equal(double ra, double rb, const Tolerances& tol = {});

// Throws DimensionError on empty or ragged input, Error on bad values.
void check_instance(const Instance& inst);

struct PreprocessReport {
  Instance instance;
  std::vector<int> kept;     // original index of each surviving ball
  std::vector<int> removed;  // original indices that were dropped
  bool trivial = false;      // one ball contains all the others
};

// Drops every ball contained in another one; duplicates keep the first copy.
PreprocessReport preprocess_instance(const Instance& raw);

// True when r_j < ‖p_k − p_j‖ + r_k for every ordered pair.
bool satisfies_assumption(const Instance& inst);

struct Projection {
  Vec projection;
  Vec complement;
};

// Orthogonal projection of w onto span(basis) via a rank-revealing solve.
Projection project_onto_span(const Vec& w, const std::vector<Vec>& basis,
                             const Tolerances& tol = {});

enum class LinearStatus { solution, no_solution, solution_with_free_vars };

struct LinearSolution {
  LinearStatus status;
  Vec x;
  double residual;
  int rank;
};

// Least-squares solve by column-pivoted QR.  The system counts as consistent
// when ‖Ax − b‖ ≤ residual_tol · (1 + ‖b‖).
LinearSolution solve_linear(const Mat& A, const Vec& b, double residual_tol = 1e-8,
                            const Tolerances& tol = {});

enum class KKTStatus { optimal, negative_multiplier, no_solution };

struct KKTSolution {
  Vec lambda;
  Vec pi;
  KKTStatus status;
  int leaving = -1;  // position in S of the most negative multiplier
  double residual = 0.0;
};

// Solves Σλ_i = 1, Σλ_i (x − p_i)/‖x − p_i‖ = 0 over S.
KKTSolution kkt_check(const Instance& inst, const ActiveSet& S, const Vec& x, double z,
                      const Tolerances& tol = {});

// Change of variables between the unit-gradient multipliers λ and the
// convex weights π, given the distances d_i = ‖x − p_i‖.
Vec lambda_to_pi(const Vec& lambda, const Vec& dist);
Vec pi_to_lambda(const Vec& pi, const Vec& dist);

// Barycentric coordinates of y in aff{p_i : i ∈ S}; status no_solution when
// y is off the affine hull.
LinearSolution barycentric(const Instance& inst, const ActiveSet& S, const Vec& y,
                           double residual_tol = 1e-8, const Tolerances& tol = {});

// Rank test on the (n+1)×s matrix [1 … 1; p_i …].
bool affinely_independent(const Instance& inst, const ActiveSet& S, const Tolerances& tol = {});

// Orthonormal basis of sub(S) = span{p_{i1} − p_j : j ∈ S}.
std::vector<Vec> subspace_basis(const Instance& inst, const ActiveSet& S,
                                const Tolerances& tol = {});

// Removes the component of w lying in span(onb); onb must be orthonormal.
Vec orthogonal_part(const Vec& w, const std::vector<Vec>& onb);

// Sorts S by non-increasing radius, ties by index.
void sort_by_radius(const Instance& inst, ActiveSet& S);

double instance_diameter(const Instance& inst);

Vec centroid(const Instance& inst);

}  // namespace minball
