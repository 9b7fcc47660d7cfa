#include "minball/conic.hpp"

#include "minball/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace minball {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec normalized(const Vec& v) { return v / v.norm(); }

// Unit vector orthogonal to every vector of the orthonormal set `onb`,
// taken from the first canonical axis that leaves a usable remainder.
Vec canonical_orthogonal(int n, const std::vector<Vec>& onb) {
  Vec best;
  double best_norm = -1.0;
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Unit(n, i);
    Vec r = orthogonal_part(orthogonal_part(e, onb), onb);
    double nr = r.norm();
    if (nr > 0.5) return r / nr;
    if (nr > best_norm) {
      best_norm = nr;
      best = r;
    }
  }
  if (best_norm <= 1e-12) throw NumericalError("no direction orthogonal to the given subspace");
  return best / best_norm;
}

}  // namespace

const char* to_string(ConicKind kind) {
  switch (kind) {
    case ConicKind::hyperboloid:
      return "hyperboloid";
    case ConicKind::ellipsoid:
      return "ellipsoid";
    case ConicKind::paraboloid:
      return "paraboloid";
  }
  return "unknown";
}

Bisector build_bisector(const Ball& a, const Ball& b, const Tolerances& tol) {
  if (a.center.size() != b.center.size()) throw DimensionError("build_bisector: dimension mismatch");
  Bisector out;
  const double dist = (a.center - b.center).norm();
  if (radii_equal(a.radius, b.radius, tol)) {
    if (dist == 0.0) throw AssumptionError("build_bisector: coincident balls", -1, -1);
    out.kind = Bisector::Kind::hyperplane;
    out.normal = (a.center - b.center) / dist;
    out.point = 0.5 * (a.center + b.center);
    return out;
  }
  const Ball& j = a.radius > b.radius ? a : b;
  const Ball& k = a.radius > b.radius ? b : a;
  out.kind = Bisector::Kind::hyperboloid_sheet;
  out.focus_j = j.center;
  out.focus_k = k.center;
  out.radius_j = j.radius;
  out.radius_k = k.radius;
  out.a = 0.5 * (j.radius - k.radius);
  out.c_param = 0.5 * dist;
  if (!(out.a < out.c_param)) {
    throw AssumptionError("build_bisector: one ball contains the other", -1, -1);
  }
  out.axis = (j.center - k.center) / dist;
  out.center = 0.5 * (j.center + k.center);
  out.eps = out.c_param / out.a;
  out.b2 = (out.c_param - out.a) * (out.c_param + out.a);
  out.vertex = out.center + out.a * out.axis;
  out.directrix = out.center + (out.a * out.a / out.c_param) * out.axis;
  return out;
}

double quadratic_form_residual(const Bisector& bis, const Vec& x) {
  if (bis.kind != Bisector::Kind::hyperboloid_sheet) {
    throw Error("quadratic_form_residual: hyperplane bisector has no quadratic form");
  }
  Vec w = x - bis.center;
  double t = bis.eps * w.dot(bis.axis);
  return w.squaredNorm() - t * t + bis.b2;
}

double quadratic_form_residual(const ConicSection& conic, const Vec& x) {
  if (conic.kind == ConicKind::paraboloid) {
    throw Error("quadratic_form_residual: use paraboloid_residual for a paraboloid");
  }
  Vec w = x - conic.center;
  double t = conic.eps * w.dot(conic.axis);
  return w.squaredNorm() - t * t - conic.a * conic.a * (1.0 - conic.eps * conic.eps);
}

double paraboloid_residual(const ConicSection& conic, const Vec& x) {
  if (conic.kind != ConicKind::paraboloid) throw Error("paraboloid_residual: not a paraboloid");
  Vec w = x - conic.center;
  double t = w.dot(conic.axis);
  return w.squaredNorm() - t * t - 4.0 * conic.c_tilde * t;
}

PairHyperplane build_pair_hyperplane(const std::array<Ball, 3>& t, const Tolerances& tol) {
  const double r1 = t[0].radius, r2 = t[1].radius, r3 = t[2].radius;
  const bool eq12 = radii_equal(r1, r2, tol);
  const bool eq23 = radii_equal(r2, r3, tol);
  if ((r1 < r2 && !eq12) || (r2 < r3 && !eq23)) {
    throw Error("build_pair_hyperplane: triple not ordered by non-increasing radius");
  }
  if (radii_equal(r1, r3, tol)) {
    throw Error("build_pair_hyperplane: all radii equal, use the hyperplane bisectors");
  }
  PairHyperplane out;
  if (eq12) {
    out.branch = 1;
    Vec d = t[0].center - t[1].center;
    out.normal = normalized(d);
    out.point = 0.5 * (t[0].center + t[1].center);
    return out;
  }
  if (eq23) {
    out.branch = 2;
    Vec d = t[1].center - t[2].center;
    out.normal = normalized(d);
    out.point = 0.5 * (t[1].center + t[2].center);
    return out;
  }
  out.branch = 3;
  Bisector b12 = build_bisector(t[0], t[1], tol);
  Bisector b13 = build_bisector(t[0], t[2], tol);
  Vec h = b12.eps * b12.axis - b13.eps * b13.axis;
  const double hn = h.norm();
  if (hn <= 1e-14 * (b12.eps + b13.eps)) {
    throw DependentSetError("build_pair_hyperplane: bisector axes are parallel");
  }
  out.normal = h / hn;
  const double offset =
      (b12.eps * b12.axis.dot(b12.directrix) - b13.eps * b13.axis.dot(b13.directrix)) / hn;
  Vec w = out.normal - out.normal.dot(b13.axis) * b13.axis;
  const double wn = w.norm();
  bool placed = false;
  if (wn > 1e-12) {
    w /= wn;
    const double denom = b12.axis.dot(w);
    if (std::abs(denom) > 1e-12) {
      out.point = b13.directrix + (b12.axis.dot(b12.directrix - b13.directrix) / denom) * w;
      placed = std::abs(out.normal.dot(out.point) - offset) <=
               1e-9 * (1.0 + std::abs(offset) + out.point.norm());
    }
  }
  if (!placed) out.point = offset * out.normal;
  return out;
}

PairHyperplane pair_hyperplane_for(const Instance& inst, int i, int j, int k,
                                   const Tolerances& tol) {
  ActiveSet idx{i, j, k};
  sort_by_radius(inst, idx);
  PairHyperplane out = build_pair_hyperplane(
      {inst.balls[idx[0]], inst.balls[idx[1]], inst.balls[idx[2]]}, tol);
  out.triple = {idx[0], idx[1], idx[2]};
  return out;
}

FoldClassification classify_hyperplane_conic(const ConicSection& conic, const Vec& hp,
                                             const Vec& point, const Tolerances& tol) {
  if (conic.kind == ConicKind::paraboloid) {
    throw ChainedParaboloidError("classify_hyperplane_conic: paraboloid predecessor");
  }
  FoldClassification out{};
  out.sigma = conic.axis.dot(hp);
  out.rho = (conic.axis - out.sigma * hp).norm();
  out.h_hat = hp.dot(point - conic.center);
  out.eps = conic.eps * out.rho;
  if (std::abs(out.eps - 1.0) <= tol.paraboloid) {
    out.kind = FoldClassification::Kind::paraboloid;
    out.a2 = 0.0;
    return out;
  }
  const double e2 = conic.eps * conic.eps;
  const double k2 = 1.0 - out.eps * out.eps;
  out.a2 = (1.0 - e2) * (conic.a * conic.a * k2 - out.h_hat * out.h_hat) / (k2 * k2);
  if (out.eps > 1.0) {
    out.kind = FoldClassification::Kind::hyperboloid;
  } else if (out.a2 > 0.0) {
    out.kind = FoldClassification::Kind::ellipsoid;
  } else {
    out.kind = FoldClassification::Kind::empty;
  }
  return out;
}

ConicSection intersect_sequence(const Instance& inst, const ActiveSet& S, const Tolerances& tol) {
  const int s = static_cast<int>(S.size());
  if (s < 2) throw Error("intersect_sequence: need at least two balls");
  const Ball& b1 = inst.balls[S.front()];
  const Ball& bs = inst.balls[S.back()];
  for (int k = 1; k < s; ++k) {
    if (inst.balls[S[k]].radius > inst.balls[S[k - 1]].radius) {
      throw Error("intersect_sequence: active set not ordered by radius");
    }
  }
  if (radii_equal(b1.radius, bs.radius, tol)) {
    throw Error("intersect_sequence: equal radii, the bisector intersection is flat");
  }
  const double gap = b1.radius - bs.radius;
  auto sheet_residual = [&](const Vec& x) {
    return coverage_value(x, b1) - coverage_value(x, bs);
  };

  Bisector base = build_bisector(b1, bs, tol);
  ConicSection cur;
  cur.kind = ConicKind::hyperboloid;
  cur.center = base.center;
  cur.axis = base.axis;
  cur.eps = base.eps;
  cur.a = base.a;
  cur.b = std::sqrt(base.b2);
  cur.dim = inst.dim;
  cur.support = S;
  Vec d_cur = base.directrix;
  const Vec& v1s = base.axis;
  const double eps1s = base.eps;

  for (int k = 1; k + 1 < s; ++k) {
    const Ball& bk = inst.balls[S[k]];
    Vec h, v1k, d1k;
    double offset;
    if (radii_equal(b1.radius, bk.radius, tol)) {
      h = normalized(b1.center - bk.center);
      v1k = h;
      d1k = 0.5 * (b1.center + bk.center);
      offset = h.dot(d1k);
    } else {
      Bisector b1k = build_bisector(b1, bk, tol);
      Vec raw = b1k.eps * b1k.axis - eps1s * v1s;
      const double rn = raw.norm();
      if (rn <= 1e-14 * (b1k.eps + eps1s)) {
        throw DependentSetError("intersect_sequence: parallel bisector axes");
      }
      h = raw / rn;
      v1k = b1k.axis;
      d1k = b1k.directrix;
      offset = (b1k.eps * b1k.axis.dot(b1k.directrix) - eps1s * v1s.dot(base.directrix)) / rn;
    }
    Vec hp = orthogonal_part(orthogonal_part(h, cur.normals), cur.normals);
    const double hpn = hp.norm();
    if (hpn <= 1e-10) throw DependentSetError("intersect_sequence: active set affinely dependent");
    hp /= hpn;

    if (cur.kind == ConicKind::paraboloid) {
      throw ChainedParaboloidError("intersect_sequence: fold of a paraboloid at k=" +
                                   std::to_string(k + 1));
    }

    // A point of H_k inside the current flat: move along u_{k−1} to the
    // directrix of B_{i1,ik}, or along hp_k when that move is ill-posed.
    const double sigma = cur.axis.dot(hp);
    Vec u = hp - sigma * cur.axis;
    Vec d_k;
    bool placed = false;
    if (u.norm() > 1e-12) {
      Vec un = normalized(u);
      const double denom = v1k.dot(un);
      if (std::abs(denom) > 1e-12) {
        d_k = d_cur + (v1k.dot(d1k - d_cur) / denom) * un;
        placed = std::abs(h.dot(d_k) - offset) <= 1e-9 * (1.0 + std::abs(offset) + d_k.norm());
      }
    }
    if (!placed) d_k = d_cur + ((offset - h.dot(d_cur)) / h.dot(hp)) * hp;

    FoldClassification fold = classify_hyperplane_conic(cur, hp, d_k, tol);
    if (fold.kind == FoldClassification::Kind::empty) {
      throw EmptyIntersectionError(k + 1, fold.h_hat, cur.eps, fold.rho);
    }
    std::vector<Vec> flat_normals = cur.normals;
    flat_normals.push_back(hp);
    Vec v_new = cur.axis - sigma * hp;
    v_new = fold.rho > 1e-12 ? Vec(v_new / fold.rho) : canonical_orthogonal(inst.dim, flat_normals);

    ConicSection next;
    next.normals = flat_normals;
    next.dim = cur.dim - 1;
    next.support = S;
    next.eps = fold.eps;
    const double e = cur.eps;
    if (fold.kind == FoldClassification::Kind::paraboloid) {
      double ct = e * sigma * fold.h_hat / 2.0;
      if (std::abs(ct) <= 1e-14 * (1.0 + cur.a)) {
        throw EmptyIntersectionError(k + 1, fold.h_hat, cur.eps, fold.rho);
      }
      const double b2 = cur.b * cur.b;
      const double chat = ((1.0 - e * e * sigma * sigma) * fold.h_hat * fold.h_hat + b2) / (4.0 * ct);
      next.kind = ConicKind::paraboloid;
      next.center = cur.center + fold.h_hat * hp + chat * v_new;
      if (ct < 0.0) {
        v_new = -v_new;
        ct = -ct;
      }
      next.axis = v_new;
      next.c_tilde = ct;
      next.eps = 1.0;
      next.vertex = next.center;
      if (std::abs(sheet_residual(next.center)) >= gap) {
        throw EmptyIntersectionError(k + 1, fold.h_hat, cur.eps, fold.rho);
      }
    } else {
      const double k2 = 1.0 - fold.eps * fold.eps;
      const double ct = e * e * fold.rho * sigma * fold.h_hat / k2;
      next.kind = fold.kind == FoldClassification::Kind::hyperboloid ? ConicKind::hyperboloid
                                                                      : ConicKind::ellipsoid;
      next.a = std::sqrt(fold.a2);
      next.b = next.a * std::sqrt(std::abs(fold.eps * fold.eps - 1.0));
      next.center = cur.center + fold.h_hat * hp + ct * v_new;
      if (next.kind == ConicKind::hyperboloid) {
        // The flat meets both sheets of the full quadric; keep the one on B.
        const double rp = std::abs(sheet_residual(next.center + next.a * v_new));
        const double rm = std::abs(sheet_residual(next.center - next.a * v_new));
        if (rm < rp) v_new = -v_new;
      } else if (std::abs(sheet_residual(next.center + next.a * v_new)) >= gap) {
        throw EmptyIntersectionError(k + 1, fold.h_hat, cur.eps, fold.rho);
      }
      next.axis = v_new;
    }
    cur = std::move(next);
    d_cur = d_k;
  }

  if (cur.kind == ConicKind::ellipsoid) {
    const double fp = coverage_value(cur.center + cur.a * cur.axis, b1);
    const double fm = coverage_value(cur.center - cur.a * cur.axis, b1);
    if (fm < fp) cur.axis = -cur.axis;
  }
  cur.vertex = cur.kind == ConicKind::paraboloid ? cur.center : Vec(cur.center + cur.a * cur.axis);
  return cur;
}

PlaneCurve::PlaneCurve(ConicSection conic, Vec u) : conic_(std::move(conic)), u_(std::move(u)) {}

Vec PlaneCurve::point(double beta) const {
  const ConicSection& c = conic_;
  switch (c.kind) {
    case ConicKind::hyperboloid:
      return c.center + (c.a / std::cos(beta)) * c.axis + (c.b * std::tan(beta)) * u_;
    case ConicKind::ellipsoid:
      return c.center + (c.a * std::cos(beta)) * c.axis + (c.b * std::sin(beta)) * u_;
    case ConicKind::paraboloid:
      return c.center + (c.c_tilde * beta * beta) * c.axis + (2.0 * c.c_tilde * beta) * u_;
  }
  return c.center;
}

Vec PlaneCurve::derivative(double beta) const {
  const ConicSection& c = conic_;
  switch (c.kind) {
    case ConicKind::hyperboloid: {
      const double sec = 1.0 / std::cos(beta);
      return (c.a * sec * std::tan(beta)) * c.axis + (c.b * sec * sec) * u_;
    }
    case ConicKind::ellipsoid:
      return (-c.a * std::sin(beta)) * c.axis + (c.b * std::cos(beta)) * u_;
    case ConicKind::paraboloid:
      return (2.0 * c.c_tilde * beta) * c.axis + (2.0 * c.c_tilde) * u_;
  }
  return Vec::Zero(c.center.size());
}

double PlaneCurve::parameter_of(const Vec& x) const {
  const ConicSection& c = conic_;
  Vec w = x - c.center;
  switch (c.kind) {
    case ConicKind::hyperboloid:
      return std::atan(w.dot(u_) / c.b);
    case ConicKind::ellipsoid:
      return std::atan2(w.dot(u_) / c.b, w.dot(c.axis) / c.a);
    case ConicKind::paraboloid:
      return w.dot(u_) / (2.0 * c.c_tilde);
  }
  return 0.0;
}

PlaneCurve parametrize_2d(const ConicSection& conic, const Vec& u) {
  if (u.size() != conic.axis.size()) throw DimensionError("parametrize_2d: dimension mismatch");
  if (std::abs(u.norm() - 1.0) > 1e-10) throw Error("parametrize_2d: u is not a unit vector");
  if (std::abs(u.dot(conic.axis)) > 1e-10) throw Error("parametrize_2d: u is not orthogonal to the axis");
  return PlaneCurve(conic, u);
}

namespace {

double sec_tan_residual(double A, double B, double C, double beta) {
  return A / std::cos(beta) + B * std::tan(beta) - C;
}

double cos_sin_residual(double A, double B, double C, double beta) {
  return A * std::cos(beta) + B * std::sin(beta) - C;
}

// A few safeguarded Newton steps on F(β) = 0.
template <class F, class DF>
double polish(double beta, F f, DF df, double lo, double hi) {
  double fb = std::abs(f(beta));
  for (int it = 0; it < 4 && fb > 0.0; ++it) {
    const double d = df(beta);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double nb = beta - f(beta) / d;
    if (!(nb > lo && nb < hi)) break;
    const double fn = std::abs(f(nb));
    if (!(fn < fb)) break;
    beta = nb;
    fb = fn;
  }
  return beta;
}

double clamp_discriminant(double disc, double scale, const Tolerances& tol) {
  if (std::abs(disc) <= tol.tangent * scale) return 0.0;
  return disc;
}

}  // namespace

ScalarRoots solve_sec_tan(double A, double B, double C, const Tolerances& tol) {
  ScalarRoots out;
  const double scale = A * A + B * B + C * C;
  if (scale == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double disc = clamp_discriminant(C * C - (A * A - B * B), scale, tol);
  if (disc < 0.0) return out;
  const double D = std::sqrt(disc);
  const double num_sec = B * B + C * C;
  const double pairs[2][2] = {{-A * B - C * D, A * C - B * D}, {-A * B + C * D, A * C + B * D}};
  const int count = disc == 0.0 ? 1 : 2;
  auto f = [&](double b) { return sec_tan_residual(A, B, C, b); };
  auto df = [&](double b) {
    const double sec = 1.0 / std::cos(b);
    return sec * (A * std::tan(b) + B * sec);
  };
  for (int r = 0; r < count; ++r) {
    const double den = pairs[r][1];
    if (den == 0.0) continue;  // the root sits at β = ±π/2
    const double tn = pairs[r][0] / den;
    const double sc = num_sec / den;
    ScalarRoot root{std::atan(tn), tn, sc, sc > 0.0};
    if (root.valid) {
      root.beta = polish(root.beta, f, df, -kPi / 2, kPi / 2);
      root.first = std::tan(root.beta);
      root.second = 1.0 / std::cos(root.beta);
    }
    out.roots.push_back(root);
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](const ScalarRoot& a, const ScalarRoot& b) { return a.beta < b.beta; });
  return out;
}

ScalarRoots solve_cos_sin(double A, double B, double C, const Tolerances& tol) {
  ScalarRoots out;
  const double ab = A * A + B * B;
  if (ab == 0.0) {
    out.degenerate = C == 0.0;
    return out;
  }
  const double disc = clamp_discriminant(ab - C * C, ab + C * C, tol);
  if (disc < 0.0) return out;
  const double D = std::sqrt(disc);
  const double pairs[2][2] = {{(A * C + B * D) / ab, (B * C - A * D) / ab},
                              {(A * C - B * D) / ab, (B * C + A * D) / ab}};
  const int count = disc == 0.0 ? 1 : 2;
  auto f = [&](double b) { return cos_sin_residual(A, B, C, b); };
  auto df = [&](double b) { return -A * std::sin(b) + B * std::cos(b); };
  for (int r = 0; r < count; ++r) {
    double beta = std::atan2(pairs[r][1], pairs[r][0]);
    beta = polish(beta, f, df, -kPi - 1.0, kPi + 1.0);
    if (beta <= -kPi) beta += 2 * kPi;
    if (beta > kPi) beta -= 2 * kPi;
    out.roots.push_back({beta, std::sin(beta), std::cos(beta), true});
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](const ScalarRoot& a, const ScalarRoot& b) { return a.beta < b.beta; });
  return out;
}

ScalarRoots solve_parabola_quadratic(double A, double B, double C, const Tolerances& tol) {
  ScalarRoots out;
  const double scale = std::abs(B) + std::abs(C);
  if (std::abs(A) <= 1e-15 * scale || A == 0.0) {
    if (B == 0.0) {
      out.degenerate = C == 0.0;
      return out;
    }
    const double beta = C / B;
    out.roots.push_back({beta, beta, 1.0, true});
    return out;
  }
  const double disc = clamp_discriminant(B * B + 4.0 * A * C, B * B + std::abs(4.0 * A * C), tol);
  if (disc < 0.0) return out;
  std::vector<double> roots;
  if (disc == 0.0) {
    roots.push_back(-B / (2.0 * A));
  } else {
    const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    roots.push_back(q / A);
    if (q != 0.0) {
      roots.push_back(-C / q);
    } else {
      roots.push_back(-q / A);
    }
  }
  std::sort(roots.begin(), roots.end());
  for (double r : roots) out.roots.push_back({r, r, 1.0, true});
  return out;
}

}  // namespace minball
