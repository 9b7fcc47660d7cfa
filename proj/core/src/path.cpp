#include "minball/path.hpp"

#include "minball/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace minball {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kScanPoints = 2048;

}  // namespace

const char* to_string(PathKind kind) {
  switch (kind) {
    case PathKind::ray:
      return "ray";
    case PathKind::hyperbola:
      return "hyperbola";
    case PathKind::ellipse:
      return "ellipse";
    case PathKind::parabola:
      return "parabola";
  }
  return "unknown";
}

PathKind path_kind_for(ConicKind kind) {
  switch (kind) {
    case ConicKind::hyperboloid:
      return PathKind::hyperbola;
    case ConicKind::ellipsoid:
      return PathKind::ellipse;
    case ConicKind::paraboloid:
      return PathKind::parabola;
  }
  return PathKind::hyperbola;
}

Vec canonical_orthogonal_direction(int n, const std::vector<Vec>& onb) {
  Vec best;
  double best_norm = -1.0;
  for (int i = 0; i < n; ++i) {
    Vec r = orthogonal_part(orthogonal_part(Vec::Unit(n, i), onb), onb);
    const double nr = r.norm();
    if (nr > 0.5) return r / nr;
    if (nr > best_norm) {
      best_norm = nr;
      best = r;
    }
  }
  if (best_norm <= 1e-12) throw NumericalError("no direction orthogonal to the active subspace");
  return best / best_norm;
}

Vec SearchPath::point(double alpha) const {
  if (alpha == 0.0) return base;
  if (kind == PathKind::ray) return base + alpha * direction;
  return curve.point(beta_s + alpha);
}

Vec SearchPath::tangent(double alpha) const {
  if (kind == PathKind::ray) return direction;
  return curve.derivative(beta_s + alpha);
}

namespace {

struct CrossingProblem {
  const Instance& inst;
  const SearchPath& path;
  int ref;
  int k;
  double approach;

  double G(double alpha) const {
    Vec x = path.point(alpha);
    return approach * (coverage_value(x, inst.balls[ref]) - coverage_value(x, inst.balls[k]));
  }

  double dG(double alpha) const {
    Vec x = path.point(alpha);
    Vec t = path.tangent(alpha);
    Vec gr = x - inst.balls[ref].center;
    Vec gk = x - inst.balls[k].center;
    const double nr = gr.norm();
    const double nk = gk.norm();
    double d = 0.0;
    if (nr > 0.0) d += gr.dot(t) / nr;
    if (nk > 0.0) d -= gk.dot(t) / nk;
    return approach * d;
  }

  double tangent_scale(double alpha) const { return 1.0 + path.tangent(alpha).norm(); }
};

// Newton refinement of a root candidate, restricted to [0, hi].
double polish_root(const CrossingProblem& P, double alpha, double hi) {
  double g = std::abs(P.G(alpha));
  for (int it = 0; it < 6 && g > 0.0; ++it) {
    const double d = P.dG(alpha);
    if (d == 0.0 || !std::isfinite(d)) break;
    double next = alpha - P.G(alpha) / d;
    next = std::clamp(next, 0.0, hi);
    const double gn = std::abs(P.G(next));
    if (!(gn < g)) break;
    alpha = next;
    g = gn;
  }
  return alpha;
}

double scan_limit(const Instance& inst, const SearchPath& path, const Step& limit) {
  if (limit.is_finite()) return path.open_end ? limit.value() * (1.0 - 1e-12) : limit.value();
  if (path.kind == PathKind::ray) {
    const double span = 1e3 * (1.0 + instance_diameter(inst));
    return span / std::max(path.direction.norm(), 1e-300);
  }
  return 1e3;
}

// Dense scan with bisection; used when the closed forms degenerate.
Step scan_for_crossing(const CrossingProblem& P, double hi, double root_tol, double slope_tol) {
  double g0 = P.G(0.0);
  if (std::abs(g0) <= root_tol && P.dG(0.0) < -slope_tol) return Step::finite(0.0);
  double prev_t = 0.0;
  double prev_g = g0;
  for (int i = 1; i <= kScanPoints; ++i) {
    const double t = hi * static_cast<double>(i) / kScanPoints;
    const double g = P.G(t);
    if (prev_g > 0.0 && g <= 0.0) {
      double lo = prev_t, up = t;
      for (int it = 0; it < 200 && up - lo > 1e-16 * (1.0 + up); ++it) {
        const double mid = 0.5 * (lo + up);
        if (P.G(mid) > 0.0) {
          lo = mid;
        } else {
          up = mid;
        }
      }
      return Step::finite(up);
    }
    prev_t = t;
    prev_g = g;
  }
  return Step::unbounded();
}

void add_ray_candidates(const Instance& inst, const SearchPath& path, int ref, int k,
                        const Tolerances& tol, std::vector<double>& cand, bool& degenerate) {
  const Ball& br = inst.balls[ref];
  const Ball& bk = inst.balls[k];
  const Vec& x0 = path.base;
  const Vec& d = path.direction;
  if (radii_equal(br.radius, bk.radius, tol)) {
    // Midplane of the two centers.
    Vec nrm = bk.center - br.center;
    const double rhs = 0.5 * (bk.center.squaredNorm() - br.center.squaredNorm());
    const double den = nrm.dot(d);
    const double num = rhs - nrm.dot(x0);
    if (den == 0.0 || std::abs(den) <= 1e-15 * nrm.norm() * d.norm()) {
      degenerate = std::abs(num) <= 1e-15 * (1.0 + std::abs(rhs));
      return;
    }
    cand.push_back(num / den);
    return;
  }
  Bisector bis = build_bisector(br, bk, tol);
  Vec w = x0 - bis.center;
  const double e2 = bis.eps * bis.eps;
  const double dv = d.dot(bis.axis);
  const double wv = w.dot(bis.axis);
  const double A = d.squaredNorm() - e2 * dv * dv;
  const double B = 2.0 * (w.dot(d) - e2 * wv * dv);
  const double C = w.squaredNorm() - e2 * wv * wv + bis.b2;
  ScalarRoots r = solve_parabola_quadratic(A, B, -C, tol);
  degenerate = r.degenerate;
  for (const ScalarRoot& root : r.roots) cand.push_back(root.beta);
}

void add_conic_candidates(const Instance& inst, const SearchPath& path, int ref, int second_ref,
                          int k, const Tolerances& tol, std::vector<double>& cand,
                          bool& degenerate) {
  PairHyperplane H = pair_hyperplane_for(inst, ref, second_ref, k, tol);
  const ConicSection& c = path.curve.conic();
  const Vec& u = path.curve.u();
  const Vec& h = H.normal;
  const double rhs = h.dot(H.point - c.center);
  ScalarRoots roots;
  double scale = 0.0;
  switch (path.kind) {
    case PathKind::hyperbola: {
      const double A = c.a * h.dot(c.axis), B = c.b * h.dot(u);
      scale = std::abs(A) + std::abs(B) + std::abs(rhs);
      roots = solve_sec_tan(A, B, rhs, tol);
      break;
    }
    case PathKind::ellipse: {
      const double A = c.a * h.dot(c.axis), B = c.b * h.dot(u);
      scale = std::abs(A) + std::abs(B) + std::abs(rhs);
      roots = solve_cos_sin(A, B, rhs, tol);
      break;
    }
    case PathKind::parabola: {
      const double A = c.c_tilde * h.dot(c.axis), B = 2.0 * c.c_tilde * h.dot(u);
      scale = std::abs(A) + std::abs(B) + std::abs(rhs);
      roots = solve_parabola_quadratic(A, B, rhs, tol);
      break;
    }
    case PathKind::ray:
      break;
  }
  // The plane contains the whole path plane: the closed forms say nothing.
  const double size = 1.0 + c.a + c.b + c.c_tilde + c.center.norm() + H.point.norm();
  if (roots.degenerate || scale <= 1e-13 * size) {
    degenerate = true;
    return;
  }
  for (const ScalarRoot& root : roots.roots) {
    if (!root.valid) continue;
    const double a0 = root.beta - path.beta_s;
    cand.push_back(a0);
    if (path.kind == PathKind::ellipse) {
      cand.push_back(a0 + 2 * kPi);
      cand.push_back(a0 - 2 * kPi);
    }
  }
}

}  // namespace

Step first_crossing(const Instance& inst, const SearchPath& path, int ref, int second_ref, int k,
                    int approach, const Step& limit, const Tolerances& tol) {
  CrossingProblem P{inst, path, ref, k, static_cast<double>(approach)};
  const double z0 = coverage_value(path.base, inst.balls[ref]);
  const double root_tol = 1e-9 * (1.0 + std::abs(z0));
  const double slope_tol = 1e-12 * P.tangent_scale(0.0);
  const double hi = scan_limit(inst, path, limit);
  const double zero_tol = 1e-10 * (1.0 + std::min(hi, 1.0));

  std::vector<double> cand;
  bool degenerate = false;
  try {
    if (path.kind == PathKind::ray) {
      add_ray_candidates(inst, path, ref, k, tol, cand, degenerate);
    } else {
      add_conic_candidates(inst, path, ref, second_ref, k, tol, cand, degenerate);
    }
  } catch (const Error&) {
    degenerate = true;
  }
  if (degenerate) return scan_for_crossing(P, hi, root_tol, slope_tol);

  const double g0 = P.G(0.0);
  if (g0 <= root_tol && P.dG(0.0) < -slope_tol) return Step::finite(0.0);

  std::sort(cand.begin(), cand.end());
  for (double a : cand) {
    if (!std::isfinite(a) || a < -zero_tol || a > hi + zero_tol) continue;
    double alpha = std::clamp(a, 0.0, hi);
    alpha = polish_root(P, alpha, hi);
    if (std::abs(P.G(alpha)) > root_tol) continue;
    const double slope = P.dG(alpha);
    if (alpha <= zero_tol) {
      // Already level with the reference ball: it only blocks when it is
      // about to overtake it.
      if (slope < -slope_tol) return Step::finite(0.0);
      continue;
    }
    if (slope > 1e-9 * P.tangent_scale(alpha)) continue;
    return Step::finite(alpha);
  }
  return Step::unbounded();
}

}  // namespace minball
