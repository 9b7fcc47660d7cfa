#include "minball/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace minball {

EmptyIntersectionError::EmptyIntersectionError(int k, double h_hat, double eps, double rho)
    : Error([&] {
        std::ostringstream os;
        os << "empty bisector intersection at fold k=" << k << " (h_hat=" << h_hat
           << ", eps=" << eps << ", rho=" << rho << ")";
        return os.str();
      }()),
      k(k),
      h_hat(h_hat),
      eps(eps),
      rho(rho) {}

double coverage_value(const Vec& x, const Ball& ball) {
  if (x.size() != ball.center.size()) {
    throw DimensionError("coverage_value: point has dimension " + std::to_string(x.size()) +
                         ", ball has " + std::to_string(ball.center.size()));
  }
  return (x - ball.center).norm() + ball.radius;
}

MaxCoverage max_coverage(const Instance& inst, const Vec& x) {
  MaxCoverage best{-std::numeric_limits<double>::infinity(), -1};
  for (std::size_t i = 0; i < inst.size(); ++i) {
    double f = coverage_value(x, inst.balls[i]);
    if (f > best.value) best = {f, static_cast<int>(i)};
  }
  return best;
}

bool radii_equal(double ra, double rb, const Tolerances& tol) {
  return std::abs(ra - rb) <= tol.radius_equal * (1.0 + std::max(std::abs(ra), std::abs(rb)));
}

void check_instance(const Instance& inst) {
  if (inst.dim < 1) throw DimensionError("instance dimension must be positive");
  if (inst.balls.empty()) throw Error("instance has no balls");
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const Ball& b = inst.balls[i];
    if (b.center.size() != inst.dim) {
      throw DimensionError("ball " + std::to_string(i) + " has dimension " +
                           std::to_string(b.center.size()) + ", expected " +
                           std::to_string(inst.dim));
    }
    if (!b.center.allFinite() || !std::isfinite(b.radius)) {
      throw Error("ball " + std::to_string(i) + " has a non-finite entry");
    }
    if (b.radius < 0.0) throw Error("ball " + std::to_string(i) + " has a negative radius");
  }
}

namespace {

// Ball k lies inside ball j.
bool contains(const Ball& j, const Ball& k) {
  return j.radius >= (k.center - j.center).norm() + k.radius;
}

}  // namespace

PreprocessReport preprocess_instance(const Instance& raw) {
  check_instance(raw);
  const std::size_t m = raw.size();
  std::vector<bool> dropped(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m && !dropped[k]; ++j) {
      if (j == k || dropped[j]) continue;
      if (!contains(raw.balls[j], raw.balls[k])) continue;
      // Mutual containment means identical balls: keep the lower index.
      if (contains(raw.balls[k], raw.balls[j]) && k < j) continue;
      dropped[k] = true;
    }
  }
  PreprocessReport rep;
  rep.instance.dim = raw.dim;
  for (std::size_t i = 0; i < m; ++i) {
    if (dropped[i]) {
      rep.removed.push_back(static_cast<int>(i));
    } else {
      rep.kept.push_back(static_cast<int>(i));
      rep.instance.balls.push_back(raw.balls[i]);
    }
  }
  rep.trivial = rep.instance.size() == 1;
  return rep;
}

bool satisfies_assumption(const Instance& inst) {
  for (std::size_t j = 0; j < inst.size(); ++j) {
    for (std::size_t k = 0; k < inst.size(); ++k) {
      if (j == k) continue;
      const Ball& a = inst.balls[j];
      const Ball& b = inst.balls[k];
      if (!(a.radius < (b.center - a.center).norm() + b.radius)) return false;
    }
  }
  return true;
}

Projection project_onto_span(const Vec& w, const std::vector<Vec>& basis, const Tolerances& tol) {
  Projection out{Vec::Zero(w.size()), w};
  if (basis.empty()) return out;
  Mat B(w.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != w.size()) throw DimensionError("project_onto_span: dimension mismatch");
    B.col(static_cast<Eigen::Index>(j)) = basis[j];
  }
  Eigen::ColPivHouseholderQR<Mat> qr(B);
  qr.setThreshold(tol.rank);
  Vec coef = qr.solve(w);
  out.projection = B * coef;
  out.complement = w - out.projection;
  // One reorthogonalisation pass against an orthonormal basis of the range
  // keeps the complement orthogonal to working precision.
  const Eigen::Index r = qr.rank();
  if (r > 0) {
    Mat Q = qr.householderQ() * Mat::Identity(w.size(), r);
    Vec extra = Q * (Q.transpose() * out.complement);
    out.complement -= extra;
    out.projection += extra;
  }
  return out;
}

LinearSolution solve_linear(const Mat& A, const Vec& b, double residual_tol,
                            const Tolerances& tol) {
  if (A.rows() != b.size()) throw DimensionError("solve_linear: row count mismatch");
  Eigen::ColPivHouseholderQR<Mat> qr(A);
  const double scale = A.size() ? A.cwiseAbs().maxCoeff() : 0.0;
  qr.setThreshold(tol.rank * std::max(1.0, scale));
  LinearSolution out;
  out.x = qr.solve(b);
  out.rank = static_cast<int>(qr.rank());
  out.residual = (A * out.x - b).norm();
  if (out.residual > residual_tol * (1.0 + b.norm())) {
    out.status = LinearStatus::no_solution;
  } else if (out.rank < A.cols()) {
    out.status = LinearStatus::solution_with_free_vars;
  } else {
    out.status = LinearStatus::solution;
  }
  return out;
}

Vec lambda_to_pi(const Vec& lambda, const Vec& dist) {
  Vec q = lambda.cwiseQuotient(dist);
  return q / q.sum();
}

Vec pi_to_lambda(const Vec& pi, const Vec& dist) {
  Vec q = pi.cwiseProduct(dist);
  return q / q.sum();
}

KKTSolution kkt_check(const Instance& inst, const ActiveSet& S, const Vec& x, double /*z*/,
                      const Tolerances& tol) {
  const int s = static_cast<int>(S.size());
  const int n = inst.dim;
  Mat A(n + 1, s);
  Vec dist(s);
  for (int j = 0; j < s; ++j) {
    Vec g = x - inst.balls[S[j]].center;
    dist[j] = g.norm();
    if (dist[j] <= tol.rank * (1.0 + x.norm())) {
      throw NumericalError("kkt_check: center coincides with ball " + std::to_string(S[j]));
    }
    A(0, j) = 1.0;
    A.block(1, j, n, 1) = g / dist[j];
  }
  Vec rhs = Vec::Zero(n + 1);
  rhs[0] = 1.0;
  LinearSolution sol = solve_linear(A, rhs, tol.kkt_residual, tol);
  KKTSolution out;
  out.lambda = sol.x;
  out.residual = sol.residual;
  if (sol.status == LinearStatus::no_solution) {
    out.status = KKTStatus::no_solution;
    out.pi = Vec::Zero(s);
    return out;
  }
  out.pi = lambda_to_pi(out.lambda, dist);
  int worst = 0;
  for (int j = 1; j < s; ++j) {
    if (out.lambda[j] < out.lambda[worst] ||
        (out.lambda[j] == out.lambda[worst] && S[j] < S[worst])) {
      worst = j;
    }
  }
  if (out.lambda[worst] < -tol.activity) {
    out.status = KKTStatus::negative_multiplier;
    out.leaving = worst;
  } else {
    out.status = KKTStatus::optimal;
  }
  return out;
}

LinearSolution barycentric(const Instance& inst, const ActiveSet& S, const Vec& y,
                           double residual_tol, const Tolerances& tol) {
  const int s = static_cast<int>(S.size());
  const int n = inst.dim;
  Mat A(n + 1, s);
  for (int j = 0; j < s; ++j) {
    A(0, j) = 1.0;
    A.block(1, j, n, 1) = inst.balls[S[j]].center - y;
  }
  Vec rhs = Vec::Zero(n + 1);
  rhs[0] = 1.0;
  return solve_linear(A, rhs, residual_tol, tol);
}

bool affinely_independent(const Instance& inst, const ActiveSet& S, const Tolerances& tol) {
  if (S.size() <= 1) return true;
  if (static_cast<int>(S.size()) > inst.dim + 1) return false;
  const Vec& p0 = inst.balls[S[0]].center;
  Mat D(inst.dim, static_cast<Eigen::Index>(S.size() - 1));
  for (std::size_t j = 1; j < S.size(); ++j) {
    D.col(static_cast<Eigen::Index>(j - 1)) = inst.balls[S[j]].center - p0;
  }
  Eigen::ColPivHouseholderQR<Mat> qr(D);
  qr.setThreshold(tol.rank * std::max(1.0, D.cwiseAbs().maxCoeff()));
  return qr.rank() == D.cols();
}

std::vector<Vec> subspace_basis(const Instance& inst, const ActiveSet& S, const Tolerances& tol) {
  std::vector<Vec> onb;
  if (S.size() <= 1) return onb;
  const Vec& p0 = inst.balls[S[0]].center;
  double scale = 0.0;
  for (std::size_t j = 1; j < S.size(); ++j) {
    scale = std::max(scale, (inst.balls[S[j]].center - p0).norm());
  }
  for (std::size_t j = 1; j < S.size(); ++j) {
    Vec w = inst.balls[S[j]].center - p0;
    w = orthogonal_part(w, onb);
    w = orthogonal_part(w, onb);
    double nw = w.norm();
    if (nw > std::sqrt(tol.rank) * std::max(1.0, scale)) onb.push_back(w / nw);
  }
  return onb;
}

Vec orthogonal_part(const Vec& w, const std::vector<Vec>& onb) {
  Vec r = w;
  for (const Vec& q : onb) r -= q.dot(r) * q;
  return r;
}

void sort_by_radius(const Instance& inst, ActiveSet& S) {
  std::sort(S.begin(), S.end(), [&](int a, int b) {
    double ra = inst.balls[a].radius;
    double rb = inst.balls[b].radius;
    if (ra != rb) return ra > rb;
    return a < b;
  });
}

double instance_diameter(const Instance& inst) {
  double d = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = i + 1; j < inst.size(); ++j) {
      d = std::max(d, (inst.balls[i].center - inst.balls[j].center).norm() +
                          inst.balls[i].radius + inst.balls[j].radius);
    }
  }
  if (inst.size() == 1) d = 2.0 * inst.balls[0].radius;
  return d;
}

Vec centroid(const Instance& inst) {
  Vec c = Vec::Zero(inst.dim);
  for (const Ball& b : inst.balls) c += b.center;
  return c / static_cast<double>(inst.size());
}

}  // namespace minball
