#include "minball/primal.hpp"

#include "minball/conic.hpp"
#include "minball/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace minball {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool equal_radii_set(const Instance& inst, const ActiveSet& S, const Tolerances& tol) {
  return radii_equal(inst.balls[S.front()].radius, inst.balls[S.back()].radius, tol);
}

double active_value(const Instance& inst, const ActiveSet& S, const Vec& x) {
  double z = -std::numeric_limits<double>::infinity();
  for (int i : S) z = std::max(z, coverage_value(x, inst.balls[i]));
  return z;
}

void record(PrimalState& st, bool on, const std::string& path, double step, StepEvent ev,
            int index) {
  if (!on) return;
  st.trace.push_back({st.iteration, st.z, static_cast<int>(st.S.size()), path, step, ev, index});
}

}  // namespace

const char* to_string(StepEvent event) {
  switch (event) {
    case StepEvent::start:
      return "start";
    case StepEvent::entered:
      return "entered";
    case StepEvent::reached_affine_hull:
      return "reached_affine_hull";
    case StepEvent::left:
      return "left";
    case StepEvent::facet_exit:
      return "facet_exit";
    case StepEvent::optimal:
      return "optimal";
  }
  return "unknown";
}

int default_iteration_cap(const Instance& inst, const SolveOptions& opt) {
  if (opt.max_iterations > 0) return opt.max_iterations;
  return std::max(100, 100 * static_cast<int>(inst.size()));
}

PrimalState primal_initialize(const Instance& inst, const std::optional<Vec>& x0,
                              const Tolerances& /*tol*/) {
  PrimalState st;
  if (inst.size() == 1) {
    st.x = inst.balls[0].center;
    st.z = inst.balls[0].radius;
    st.S = {0};
    st.optimal = true;
    st.weights = Vec::Ones(1);
    return st;
  }
  st.x = x0 ? *x0 : centroid(inst);
  if (st.x.size() != inst.dim) throw DimensionError("primal_initialize: start point dimension");
  MaxCoverage mc = max_coverage(inst, st.x);
  st.z = mc.value;
  st.S = {mc.index};
  return st;
}

SearchPath primal_ray_path(const Instance& inst, const PrimalState& state,
                           const Tolerances& tol) {
  SearchPath path;
  path.kind = PathKind::ray;
  path.base = state.x;
  const Vec w = inst.balls[state.S.front()].center - state.x;
  const std::vector<Vec> basis = subspace_basis(inst, state.S, tol);
  Vec d = orthogonal_part(orthogonal_part(w, basis), basis);
  path.direction = d;
  const double dn2 = d.squaredNorm();
  if (dn2 <= 1e-24 * (1.0 + w.squaredNorm())) {
    path.domain = Step::finite(0.0);
  } else {
    path.domain = Step::finite(w.dot(d) / dn2);
  }
  return path;
}

Step primal_ray_entering_step(const Instance& inst, const PrimalState& state,
                              const SearchPath& path, int k, const Tolerances& tol) {
  return first_crossing(inst, path, state.S.front(), state.S.back(), k, +1, path.domain, tol);
}

SearchPath primal_conic_path(const Instance& inst, const PrimalState& state,
                             const Tolerances& tol) {
  ConicSection conic = intersect_sequence(inst, state.S, tol);
  std::vector<Vec> basis = subspace_basis(inst, state.S, tol);
  Vec w = state.x - conic.center;
  Vec wp = orthogonal_part(orthogonal_part(w, basis), basis);
  Vec u;
  if (wp.norm() > 1e-13 * (1.0 + w.norm())) {
    u = -wp;
  } else {
    std::vector<Vec> onb = basis;
    Vec v = orthogonal_part(conic.axis, onb);
    if (v.norm() > 1e-8) onb.push_back(v.normalized());
    u = canonical_orthogonal_direction(inst.dim, onb);
  }
  u -= u.dot(conic.axis) * conic.axis;
  u.normalize();

  SearchPath path;
  path.kind = path_kind_for(conic.kind);
  path.base = state.x;
  path.curve = parametrize_2d(conic, u);
  double beta = path.curve.parameter_of(state.x);
  if (beta > 0.0) beta = (path.kind == PathKind::ellipse && beta > kPi / 2) ? beta - 2 * kPi : 0.0;
  path.beta_s = beta;
  path.domain = Step::finite(-beta);
  return path;
}

Step primal_conic_entering_step(const Instance& inst, const PrimalState& state,
                                const SearchPath& path, int k, const Tolerances& tol) {
  return first_crossing(inst, path, state.S.front(), state.S.back(), k, +1, path.domain, tol);
}

StepEvent primal_iterate(const Instance& inst, PrimalState& st, const Tolerances& tol,
                         bool trace) {
  if (st.optimal) return StepEvent::optimal;
  const int m = static_cast<int>(inst.size());
  ++st.iteration;

  const bool ray = equal_radii_set(inst, st.S, tol);
  SearchPath path = ray ? primal_ray_path(inst, st, tol) : primal_conic_path(inst, st, tol);
  const double bound = path.domain.value();

  std::vector<bool> in_s(m, false);
  for (int i : st.S) in_s[i] = true;
  int entering = -1;
  double best = 0.0;
  for (int k = 0; k < m; ++k) {
    if (in_s[k]) continue;
    Step a = ray ? primal_ray_entering_step(inst, st, path, k, tol)
                 : primal_conic_entering_step(inst, st, path, k, tol);
    if (!a.is_finite()) continue;
    const double tie = 1e-12 * (1.0 + std::abs(a.value()));
    if (entering < 0 || a.value() < best - tie) {
      entering = k;
      best = a.value();
    }
  }

  const bool enters = entering >= 0 && best <= bound + 1e-12 * (1.0 + bound);
  const double alpha = enters ? std::min(best, bound) : bound;
  if (enters) {
    st.x = path.point(alpha);
  } else if (path.is_conic()) {
    st.x = path.curve.conic().vertex;
  } else {
    st.x = path.base + bound * path.direction;
  }
  const double step_len = alpha * path.tangent(0.0).norm();
  if (step_len <= 1e-12 * (1.0 + st.z)) {
    if (++st.zero_steps > m) {
      throw NumericalError("primal: " + std::to_string(st.zero_steps) +
                           " consecutive zero steps, degenerate cycling suspected");
    }
  } else {
    st.zero_steps = 0;
  }

  StepEvent ev;
  if (enters) {
    st.S.push_back(entering);
    sort_by_radius(inst, st.S);
    ev = StepEvent::entered;
    if (!affinely_independent(inst, st.S, tol)) {
      // p_e lies in the affine hull of the old set: trade it against the
      // lowest-index member carrying a nonzero affine coordinate.
      ActiveSet old = st.S;
      old.erase(std::find(old.begin(), old.end(), entering));
      LinearSolution mu = barycentric(inst, old, inst.balls[entering].center, 1e-8, tol);
      int drop = -1;
      for (int j = 0; j < static_cast<int>(old.size()); ++j) {
        if (std::abs(mu.x[j]) > 1e-9 && (drop < 0 || old[j] < drop)) drop = old[j];
      }
      if (drop < 0) throw NumericalError("primal: cannot restore affine independence");
      st.S.erase(std::find(st.S.begin(), st.S.end(), drop));
    }
  } else {
    ev = StepEvent::reached_affine_hull;
  }
  st.z = active_value(inst, st.S, st.x);
  record(st, trace, to_string(path.kind), alpha, ev, enters ? entering : -1);

  // Update phase.
  while (true) {
    KKTSolution kkt = kkt_check(inst, st.S, st.x, st.z, tol);
    if (kkt.status == KKTStatus::no_solution) break;
    if (kkt.status == KKTStatus::optimal) {
      st.optimal = true;
      st.weights = kkt.pi;
      record(st, trace, "", 0.0, StepEvent::optimal, -1);
      return StepEvent::optimal;
    }
    const int leaving = st.S[kkt.leaving];
    st.S.erase(st.S.begin() + kkt.leaving);
    record(st, trace, "", 0.0, StepEvent::left, leaving);
    ev = StepEvent::left;
  }
  return ev;
}

SolveResult primal_solve(const Instance& inst, const SolveOptions& opt) {
  PreprocessReport pre = preprocess_instance(inst);
  const Instance& work = pre.instance;
  const int cap = default_iteration_cap(work, opt);
  PrimalState st = primal_initialize(work, opt.initial_point, opt.tol);
  if (opt.trace) st.trace.push_back({0, st.z, static_cast<int>(st.S.size()), "", 0.0,
                                      StepEvent::start, st.S.front()});
  while (!st.optimal) {
    if (st.iteration >= cap) {
      throw IterationLimitError("primal: iteration cap " + std::to_string(cap) + " reached",
                                CoveringBall{st.x, max_coverage(work, st.x).value}, st.iteration);
    }
    primal_iterate(work, st, opt.tol, opt.trace);
  }
  SolveResult res;
  res.algorithm = "primal";
  res.ball = {st.x, max_coverage(work, st.x).value};
  for (int i : st.S) res.support.push_back(pre.kept[i]);
  res.weights = st.weights;
  res.iterations = st.iteration;
  res.trace = std::move(st.trace);
  for (TraceEntry& t : res.trace) {
    if (t.index >= 0) t.index = pre.kept[t.index];
  }
  return res;
}

}  // namespace minball
