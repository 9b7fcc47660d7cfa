#include "minball/dual.hpp"

#include "minball/conic.hpp"
#include "minball/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace minball {

namespace {

constexpr double kPi = 3.14159265358979323846;

void record(DualState& st, bool on, const std::string& path, double step, StepEvent ev,
            int index) {
  if (!on) return;
  st.trace.push_back({st.iteration, st.z, static_cast<int>(st.S.size()), path, step, ev, index});
}

Vec barycentric_or_throw(const Instance& inst, const ActiveSet& S, const Vec& x,
                         const Tolerances& tol) {
  LinearSolution b = barycentric(inst, S, x, 1e-6, tol);
  if (b.status == LinearStatus::no_solution) {
    throw NumericalError("dual: center left the affine hull of the active set");
  }
  return b.x;
}

}  // namespace

std::pair<int, int> dual_default_pair(const Instance& inst) {
  const int m = static_cast<int>(inst.size());
  const int stride = m > 2000 ? (m + 1999) / 2000 : 1;
  double best = -1.0;
  std::pair<int, int> pair{0, std::min(1, m - 1)};
  for (int i = 0; i < m; i += stride) {
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double v = (inst.balls[i].center - inst.balls[j].center).norm() +
                       inst.balls[i].radius + inst.balls[j].radius;
      if (v > best) {
        best = v;
        pair = {std::min(i, j), std::max(i, j)};
      }
    }
  }
  return pair;
}

DualState dual_initialize(const Instance& inst, const std::optional<std::pair<int, int>>& pair,
                          const Tolerances& tol) {
  DualState st;
  if (inst.size() == 1) {
    st.S = {0};
    st.x = inst.balls[0].center;
    st.z = inst.balls[0].radius;
    st.pi = Vec::Ones(1);
    st.optimal = true;
    return st;
  }
  auto [j, k] = pair ? *pair : dual_default_pair(inst);
  if (j == k) throw Error("dual_initialize: the initial pair needs two distinct balls");
  if (inst.balls[k].radius > inst.balls[j].radius) std::swap(j, k);
  const Ball& bj = inst.balls[j];
  const Ball& bk = inst.balls[k];
  const Vec diff = bj.center - bk.center;
  const double dist = diff.norm();
  st.x = 0.5 * (bj.center + bk.center) + (0.5 * (bj.radius - bk.radius) / dist) * diff;
  st.z = (st.x - bj.center).norm() + bj.radius;
  st.S = {j, k};
  sort_by_radius(inst, st.S);
  st.pi = barycentric_or_throw(inst, st.S, st.x, tol);
  return st;
}

OptimalityCheck dual_optimality_check(const Instance& inst, const DualState& st,
                                      const Tolerances& tol) {
  OptimalityCheck out{true, -1, 0.0};
  const double lim = tol.activity * (1.0 + std::abs(st.z));
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double v = coverage_value(st.x, inst.balls[i]) - st.z;
    if (v > lim && v > out.violation) {
      out = {false, static_cast<int>(i), v};
    }
  }
  return out;
}

AffineUpdate dual_affine_update(const Instance& inst, DualState& st, int e,
                                const Tolerances& tol) {
  AffineUpdate out;
  ActiveSet with = st.S;
  with.push_back(e);
  if (affinely_independent(inst, with, tol)) return out;
  out.dependent = true;
  LinearSolution mu = barycentric(inst, st.S, inst.balls[e].center, 1e-6, tol);
  out.lambda = -mu.x;
  Vec pi = barycentric_or_throw(inst, st.S, st.x, tol);
  int pos = -1;
  double best = 0.0;
  for (int j = 0; j < static_cast<int>(st.S.size()); ++j) {
    if (mu.x[j] <= 1e-12) continue;
    const double ratio = std::max(pi[j], 0.0) / mu.x[j];
    if (pos < 0 || ratio < best - 1e-15 || (ratio <= best + 1e-15 && st.S[j] < st.S[pos])) {
      pos = j;
      best = ratio;
    }
  }
  if (pos < 0) {
    throw NumericalError("dual_affine_update: dependent set without a negative multiplier");
  }
  // x = Σ(π_j − tμ_j)p_j + t·p_e, so x stays in conv(S ∪ {e} \ {l}) but
  // generally leaves aff(S \ {l}); the remaining weights are kept as is.
  Vec rest = pi - best * mu.x;
  out.leaving = st.S[pos];
  st.S.erase(st.S.begin() + pos);
  st.pi.resize(rest.size() - 1);
  for (int j = 0, c = 0; j < static_cast<int>(rest.size()); ++j) {
    if (j != pos) st.pi[c++] = std::max(rest[j], 0.0);
  }
  return out;
}

DualStep dual_ray_path_and_step(const Instance& inst, const DualState& st, int e,
                                const Tolerances& tol) {
  DualStep out;
  SearchPath& path = out.path;
  path.kind = PathKind::ray;
  path.base = st.x;
  const Vec w = inst.balls[e].center - inst.balls[st.S.front()].center;
  const std::vector<Vec> basis = subspace_basis(inst, st.S, tol);
  path.direction = orthogonal_part(orthogonal_part(w, basis), basis);
  path.domain = Step::unbounded();
  out.alpha = first_crossing(inst, path, st.S.front(), st.S.back(), e, -1, path.domain, tol);
  return out;
}

DualStep dual_conic_path_and_step(const Instance& inst, const DualState& st, int e,
                                  const Tolerances& tol) {
  DualStep out;
  ConicSection conic = intersect_sequence(inst, st.S, tol);
  const std::vector<Vec> basis = subspace_basis(inst, st.S, tol);
  Vec u = orthogonal_part(orthogonal_part(inst.balls[e].center - conic.center, basis), basis);
  if (u.norm() <= 1e-12) throw DependentSetError("dual: entering ball lies in aff(S)");
  u -= u.dot(conic.axis) * conic.axis;
  u.normalize();

  SearchPath& path = out.path;
  path.kind = path_kind_for(conic.kind);
  path.base = st.x;
  path.curve = parametrize_2d(conic, u);
  double beta = path.curve.parameter_of(st.x);
  if (beta < 0.0) beta = (path.kind == PathKind::ellipse && beta < -kPi / 2) ? beta + 2 * kPi : 0.0;
  path.beta_s = beta;
  switch (path.kind) {
    case PathKind::hyperbola:
      path.domain = Step::finite(kPi / 2 - beta);
      path.open_end = true;
      break;
    case PathKind::ellipse:
      path.domain = Step::finite(kPi - beta);
      break;
    default:
      path.domain = Step::unbounded();
      break;
  }
  out.alpha = first_crossing(inst, path, st.S.front(), st.S.back(), e, -1, path.domain, tol);
  return out;
}

Vec FacetExitSystem::pi(const SearchPath& path, double alpha) const {
  if (path.kind == PathKind::ray) return gamma - alpha * delta;
  const ConicSection& c = path.curve.conic();
  const double beta = path.beta(alpha);
  switch (path.kind) {
    case PathKind::hyperbola:
      return gamma - (c.a / std::cos(beta)) * delta - (c.b * std::tan(beta)) * xi;
    case PathKind::ellipse:
      return gamma - (c.a * std::cos(beta)) * delta - (c.b * std::sin(beta)) * xi;
    case PathKind::parabola:
      return gamma - (c.c_tilde * beta * beta) * delta - (2.0 * c.c_tilde * beta) * xi;
    default:
      return gamma;
  }
}

FacetExitSystem build_facet_exit_system(const Instance& inst, const ActiveSet& S, int e,
                                        const SearchPath& path, const Tolerances& tol) {
  const int s = static_cast<int>(S.size());
  const int n = inst.dim;
  const Vec base = path.is_conic() ? path.curve.conic().center : path.base;
  FacetExitSystem sys;
  sys.T.resize(n + 1, s + 1);
  for (int j = 0; j <= s; ++j) {
    const int idx = j < s ? S[j] : e;
    sys.T(0, j) = 1.0;
    sys.T.block(1, j, n, 1) = base - inst.balls[idx].center;
  }
  Mat rhs = Mat::Zero(n + 1, 3);
  rhs(0, 0) = 1.0;
  if (path.is_conic()) {
    rhs.block(1, 1, n, 1) = path.curve.conic().axis;
    rhs.block(1, 2, n, 1) = path.curve.u();
  } else {
    rhs.block(1, 1, n, 1) = path.direction;
  }
  Eigen::ColPivHouseholderQR<Mat> qr(sys.T);
  qr.setThreshold(tol.rank * std::max(1.0, sys.T.cwiseAbs().maxCoeff()));
  if (qr.rank() < s + 1) throw NumericalError("dual: facet-exit system is rank deficient");
  Mat sol = qr.solve(rhs);
  sys.gamma = sol.col(0);
  sys.delta = sol.col(1);
  sys.xi = sol.col(2);
  sys.residual = (sys.T * sol - rhs).norm();
  return sys;
}

namespace {

double pi_slope(const FacetExitSystem& sys, const SearchPath& path, double alpha, int j) {
  if (path.kind == PathKind::ray) return -sys.delta[j];
  const ConicSection& c = path.curve.conic();
  const double beta = path.beta(alpha);
  switch (path.kind) {
    case PathKind::hyperbola: {
      const double sec = 1.0 / std::cos(beta);
      return -(c.a * sec * std::tan(beta) * sys.delta[j] + c.b * sec * sec * sys.xi[j]);
    }
    case PathKind::ellipse:
      return c.a * std::sin(beta) * sys.delta[j] - c.b * std::cos(beta) * sys.xi[j];
    case PathKind::parabola:
      return -(2.0 * c.c_tilde * beta * sys.delta[j] + 2.0 * c.c_tilde * sys.xi[j]);
    default:
      return 0.0;
  }
}

// Candidate α where π_j vanishes.
std::vector<double> exit_candidates(const FacetExitSystem& sys, const SearchPath& path, int j,
                                    const Tolerances& tol) {
  std::vector<double> out;
  if (path.kind == PathKind::ray) {
    if (sys.delta[j] > 0.0) out.push_back(sys.gamma[j] / sys.delta[j]);
    return out;
  }
  const ConicSection& c = path.curve.conic();
  ScalarRoots roots;
  switch (path.kind) {
    case PathKind::hyperbola:
      roots = solve_sec_tan(c.a * sys.delta[j], c.b * sys.xi[j], sys.gamma[j], tol);
      break;
    case PathKind::ellipse:
      roots = solve_cos_sin(c.a * sys.delta[j], c.b * sys.xi[j], sys.gamma[j], tol);
      break;
    case PathKind::parabola:
      roots = solve_parabola_quadratic(c.c_tilde * sys.delta[j], 2.0 * c.c_tilde * sys.xi[j],
                                       sys.gamma[j], tol);
      break;
    default:
      break;
  }
  for (const ScalarRoot& r : roots.roots) {
    if (!r.valid) continue;
    const double a0 = r.beta - path.beta_s;
    out.push_back(a0);
    if (path.kind == PathKind::ellipse) {
      out.push_back(a0 + 2 * kPi);
      out.push_back(a0 - 2 * kPi);
    }
  }
  return out;
}

}  // namespace

FacetExit dual_facet_exit(const Instance& inst, const DualState& st, const SearchPath& path, int e,
                          const Step& alpha_prime, const Tolerances& tol) {
  FacetExitSystem sys = build_facet_exit_system(inst, st.S, e, path, tol);
  const int s = static_cast<int>(st.S.size());
  FacetExit out;
  if (alpha_prime.is_finite()) {
    Vec p = sys.pi(path, alpha_prime.value());
    if (p.minCoeff() >= -tol.barycentric) {
      out.accepted = true;
      out.alpha = alpha_prime.value();
      out.pi = p;
      return out;
    }
  }
  double limit;
  if (alpha_prime.is_finite()) {
    limit = alpha_prime.value();
  } else if (path.domain.is_finite()) {
    limit = path.domain.value();
  } else {
    limit = std::numeric_limits<double>::infinity();
  }
  const double zero_tol = 1e-12;
  int best_j = -1;
  double best = 0.0;
  const Vec pi0 = sys.pi(path, 0.0);
  for (int j = 0; j < s; ++j) {
    double found = -1.0;
    if (pi0[j] <= tol.barycentric && pi_slope(sys, path, 0.0, j) < 0.0) {
      found = 0.0;
    } else {
      std::vector<double> cand = exit_candidates(sys, path, j, tol);
      std::sort(cand.begin(), cand.end());
      for (double a : cand) {
        if (!std::isfinite(a) || a < -zero_tol || a > limit) continue;
        const double alpha = std::max(a, 0.0);
        if (pi_slope(sys, path, alpha, j) > 0.0) continue;
        found = alpha;
        break;
      }
    }
    if (found < 0.0) continue;
    if (best_j < 0 || found < best - 1e-15 * (1.0 + found) ||
        (found <= best + 1e-15 * (1.0 + found) && st.S[j] < st.S[best_j])) {
      best_j = j;
      best = found;
    }
  }
  if (best_j < 0) {
    throw NumericalError("dual_facet_exit: negative weight at the entering point but no facet hit");
  }
  out.alpha = best;
  out.leaving = st.S[best_j];
  out.pi = sys.pi(path, best);
  return out;
}

StepEvent dual_iterate(const Instance& inst, DualState& st, const Tolerances& tol, bool trace,
                       int iteration_cap) {
  if (st.optimal) return StepEvent::optimal;
  OptimalityCheck chk = dual_optimality_check(inst, st, tol);
  if (chk.optimal) {
    st.optimal = true;
    record(st, trace, "", 0.0, StepEvent::optimal, -1);
    return StepEvent::optimal;
  }
  const int e = chk.entering;
  st.entering = e;
  AffineUpdate upd = dual_affine_update(inst, st, e, tol);
  if (upd.dependent) record(st, trace, "", 0.0, StepEvent::left, upd.leaving);

  while (true) {
    if (++st.iteration > iteration_cap) {
      throw IterationLimitError("dual: iteration cap " + std::to_string(iteration_cap) +
                                    " reached",
                                CoveringBall{st.x, st.z}, st.iteration);
    }
    const bool ray = st.S.size() == 1 ||
                     radii_equal(inst.balls[st.S.front()].radius, inst.balls[st.S.back()].radius,
                                 tol);
    DualStep step = ray ? dual_ray_path_and_step(inst, st, e, tol)
                        : dual_conic_path_and_step(inst, st, e, tol);
    FacetExit fx = dual_facet_exit(inst, st, step.path, e, step.alpha, tol);
    st.x = step.path.point(fx.alpha);
    if (fx.accepted) {
      st.S.push_back(e);
      sort_by_radius(inst, st.S);
      st.z = coverage_value(st.x, inst.balls[st.S.front()]);
      st.pi = barycentric_or_throw(inst, st.S, st.x, tol);
      st.entering = -1;
      record(st, trace, to_string(step.path.kind), fx.alpha, StepEvent::entered, e);
      return StepEvent::entered;
    }
    const int pos = static_cast<int>(std::find(st.S.begin(), st.S.end(), fx.leaving) - st.S.begin());
    Vec kept(st.S.size() - 1);
    for (int j = 0, c = 0; j < static_cast<int>(st.S.size()); ++j) {
      if (j != pos) kept[c++] = std::max(fx.pi[j], 0.0);
    }
    st.S.erase(st.S.begin() + pos);
    st.pi = kept;
    st.z = coverage_value(st.x, inst.balls[st.S.front()]);
    record(st, trace, to_string(step.path.kind), fx.alpha, StepEvent::facet_exit, fx.leaving);
  }
}

SolveResult dual_solve(const Instance& inst, const SolveOptions& opt) {
  PreprocessReport pre = preprocess_instance(inst);
  const Instance& work = pre.instance;
  const int cap = default_iteration_cap(work, opt);
  std::optional<std::pair<int, int>> pair;
  if (opt.initial_pair) {
    auto find = [&](int orig) {
      auto it = std::find(pre.kept.begin(), pre.kept.end(), orig);
      if (it == pre.kept.end()) throw Error("dual: initial pair refers to a removed ball");
      return static_cast<int>(it - pre.kept.begin());
    };
    pair = std::make_pair(find(opt.initial_pair->first), find(opt.initial_pair->second));
  }
  DualState st = dual_initialize(work, pair, opt.tol);
  if (opt.trace) {
    st.trace.push_back({0, st.z, static_cast<int>(st.S.size()), "", 0.0, StepEvent::start, -1});
  }
  while (!st.optimal) dual_iterate(work, st, opt.tol, opt.trace, cap);
  SolveResult res;
  res.algorithm = "dual";
  res.ball = {st.x, max_coverage(work, st.x).value};
  for (int i : st.S) res.support.push_back(pre.kept[i]);
  res.weights = st.pi;
  res.iterations = st.iteration;
  res.trace = std::move(st.trace);
  for (TraceEntry& t : res.trace) {
    if (t.index >= 0) t.index = pre.kept[t.index];
  }
  return res;
}

}  // namespace minball
