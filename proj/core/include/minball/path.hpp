#pragma once

#include "minball/conic.hpp"
#include "minball/types.hpp"

#include <string>

namespace minball {

enum class PathKind { ray, hyperbola, ellipse, parabola };

const char* to_string(PathKind kind);

// A curve x(α), α ≥ 0, through the current center along which every ball of
// the active set keeps the same coverage value.  Conic paths use β = β_S + α.
struct SearchPath {
  PathKind kind = PathKind::ray;
  Vec base;       // x_S
  Vec direction;  // d_S for a ray
  PlaneCurve curve;
  double beta_s = 0.0;
  Step domain = Step::unbounded();  // largest admissible α
  bool open_end = false;            // the domain bound itself is excluded

  Vec point(double alpha) const;
  Vec tangent(double alpha) const;
  double beta(double alpha) const { return beta_s + alpha; }
  bool is_conic() const { return kind != PathKind::ray; }
};

PathKind path_kind_for(ConicKind kind);

// Unit vector orthogonal to every vector of an orthonormal set.
Vec canonical_orthogonal_direction(int n, const std::vector<Vec>& onb);

// First α in [0, limit] at which ball k reaches the coverage value of ball
// `ref` (a member of the active set).  `approach` is +1 when ball k is
// currently below the reference value (primal blocking) and −1 when it is
// above it (dual entering).  `second_ref` is the last member of the active
// set and selects the pair plane used on conic paths.
Step first_crossing(const Instance& inst, const SearchPath& path, int ref, int second_ref, int k,
                    int approach, const Step& limit, const Tolerances& tol);

}  // namespace minball
