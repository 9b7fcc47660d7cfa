#pragma once

#include "minball/types.hpp"

#include <array>
#include <vector>

namespace minball {

// Locus where two balls have equal coverage value.
struct Bisector {
  enum class Kind { hyperplane, hyperboloid_sheet };
  Kind kind = Kind::hyperplane;

  // Hyperplane {x : normal·x = normal·point}; normal points from b toward a.
  Vec normal;
  Vec point;

  // Hyperboloid sheet; p_j is the larger-radius focus.
  Vec focus_j;
  Vec focus_k;
  double radius_j = 0.0;
  double radius_k = 0.0;
  Vec center;
  Vec axis;  // unit, from p_k toward p_j
  double a = 0.0;
  double c_param = 0.0;
  double eps = 0.0;
  double b2 = 0.0;
  Vec vertex;
  Vec directrix;  // d = c + (a²/c_param)·v

  // ε(v·x − v·d), equal to ‖x − p_j‖ on the sheet.
  double focal_distance(const Vec& x) const { return eps * axis.dot(x - directrix); }
};

// Orders the pair internally so that the larger radius becomes p_j.
Bisector build_bisector(const Ball& a, const Ball& b, const Tolerances& tol = {});

enum class ConicKind { hyperboloid, ellipsoid, paraboloid };

const char* to_string(ConicKind kind);

// Intersection B_S of the bisectors of an ordered active set, a quadric of
// revolution living in the flat cut out by the accumulated normals.
struct ConicSection {
  ConicKind kind = ConicKind::hyperboloid;
  Vec center;  // c_S, or the vertex ĉ_S of a paraboloid
  Vec axis;    // v_S, oriented so that z grows away from the vertex
  Vec vertex;  // a_S, the point of smallest coverage value
  double eps = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c_tilde = 0.0;
  std::vector<Vec> normals;  // hp_2 … hp_{s−1}, orthonormal
  int dim = 0;               // n − s + 2
  ActiveSet support;         // ordered by non-increasing radius
};

// (x−c)² − [ε(x−c)·v]² − (a² − c_param²) for a sheet or a central conic.
double quadratic_form_residual(const Bisector& bis, const Vec& x);
double quadratic_form_residual(const ConicSection& conic, const Vec& x);

// (x−ĉ)² − ((x−ĉ)·v)² − 4c̃ (x−ĉ)·v.
double paraboloid_residual(const ConicSection& conic, const Vec& x);

struct PairHyperplane {
  Vec normal;
  Vec point;
  std::array<int, 3> triple{-1, -1, -1};
  int branch = 0;  // 1: r1=r2>r3, 2: r1>r2=r3, 3: r1>r2>r3

  double offset(const Vec& x) const { return normal.dot(x - point); }
};

// Balls must be ordered r1 ≥ r2 ≥ r3 with r1 > r3.  The returned plane
// contains every point common to the three bisectors.
PairHyperplane build_pair_hyperplane(const std::array<Ball, 3>& triple,
                                     const Tolerances& tol = {});

// Sorts three instance indices by radius and builds their plane.
PairHyperplane pair_hyperplane_for(const Instance& inst, int i, int j, int k,
                                   const Tolerances& tol = {});

struct FoldClassification {
  enum class Kind { hyperboloid, ellipsoid, paraboloid, empty };
  Kind kind;
  double h_hat;
  double rho;
  double sigma;
  double eps;    // ε·ρ
  double a2;     // squared semi-axis after the fold; unused for a paraboloid
};

// Classifies the intersection of a hyperboloid or ellipsoid with the
// hyperplane {x : hp·(x − point) = 0}.
FoldClassification classify_hyperplane_conic(const ConicSection& conic, const Vec& hp,
                                             const Vec& point, const Tolerances& tol = {});

// Builds B_S for S ordered by non-increasing radius with r_{i1} > r_{is}.
// Throws EmptyIntersectionError, DependentSetError or ChainedParaboloidError.
ConicSection intersect_sequence(const Instance& inst, const ActiveSet& S,
                                const Tolerances& tol = {});

// Planar section Y_S of a conic spanned by its axis and u.
class PlaneCurve {
 public:
  PlaneCurve() = default;
  PlaneCurve(ConicSection conic, Vec u);

  Vec point(double beta) const;
  Vec derivative(double beta) const;
  const ConicSection& conic() const { return conic_; }
  const Vec& u() const { return u_; }

  // Parameter of a point known to lie on the curve.
  double parameter_of(const Vec& x) const;

 private:
  ConicSection conic_;
  Vec u_;
};

// u must be a unit vector orthogonal to the axis.
PlaneCurve parametrize_2d(const ConicSection& conic, const Vec& u);

struct ScalarRoot {
  double beta;
  double first;   // tan β (sec/tan) or sin β (cos/sin)
  double second;  // sec β (sec/tan) or cos β (cos/sin)
  bool valid;     // sec/tan: sec β > 0, i.e. the root lies on the tracked branch
};

struct ScalarRoots {
  std::vector<ScalarRoot> roots;
  bool degenerate = false;  // all coefficients vanish: every β solves it
};

// A sec β + B tan β = C over β ∈ (−π/2, π/2).
ScalarRoots solve_sec_tan(double A, double B, double C, const Tolerances& tol = {});

// A cos β + B sin β = C; roots reported in (−π, π].
ScalarRoots solve_cos_sin(double A, double B, double C, const Tolerances& tol = {});

// A β² + B β = C; roots ascending.
ScalarRoots solve_parabola_quadratic(double A, double B, double C, const Tolerances& tol = {});

}  // namespace minball
