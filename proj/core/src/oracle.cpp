#include "minball/oracle.hpp"

#include "minball/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace minball {

namespace {

// min ‖G_P z‖ subject to Σz = 1 over the columns in P, signs unconstrained.
Vec affine_min_norm(const Mat& G, const std::vector<int>& P) {
  const int k = static_cast<int>(P.size());
  Vec z = Vec::Zero(k);
  if (k == 1) {
    z[0] = 1.0;
    return z;
  }
  Mat N(G.rows(), k - 1);
  for (int c = 1; c < k; ++c) N.col(c - 1) = G.col(P[c]) - G.col(P[0]);
  const Vec t = N.colPivHouseholderQr().solve(-G.col(P[0]));
  z[0] = 1.0 - t.sum();
  z.tail(k - 1) = t;
  return z;
}

Vec unit_gradient(const Vec& x, const Vec& p) {
  Vec g = x - p;
  const double d = g.norm();
  if (d == 0.0) return Vec::Zero(x.size());
  return g / d;
}

}  // namespace

// Wolfe's minimum-norm-point method on conv{g_j}.
Vec simplex_least_squares(const Mat& G, double* residual) {
  const int s = static_cast<int>(G.cols());
  if (s == 0) {
    if (residual) *residual = 0.0;
    return Vec();
  }
  int start = 0;
  for (int j = 1; j < s; ++j)
    if (G.col(j).squaredNorm() < G.col(start).squaredNorm()) start = j;
  std::vector<int> P{start};
  Vec lambda = Vec::Zero(s);
  lambda[start] = 1.0;
  const double scale = std::max(1.0, G.colwise().squaredNorm().maxCoeff());
  for (int outer = 0; outer < 4 * s + 10; ++outer) {
    const Vec r = G * lambda;
    const double nu = r.squaredNorm();
    int add = -1;
    double gain = 1e-14 * scale;
    for (int j = 0; j < s; ++j) {
      if (std::find(P.begin(), P.end(), j) != P.end()) continue;
      const double w = nu - G.col(j).dot(r);
      if (w > gain) {
        gain = w;
        add = j;
      }
    }
    if (add < 0) break;
    P.push_back(add);
    for (int inner = 0; inner < s + 1; ++inner) {
      const Vec z = affine_min_norm(G, P);
      if (z.minCoeff() > 0.0) {
        lambda.setZero();
        for (int c = 0; c < static_cast<int>(P.size()); ++c) lambda[P[c]] = z[c];
        break;
      }
      double alpha = 1.0;
      for (int c = 0; c < static_cast<int>(P.size()); ++c) {
        if (z[c] <= 0.0) alpha = std::min(alpha, lambda[P[c]] / (lambda[P[c]] - z[c]));
      }
      std::vector<int> keep;
      for (int c = 0; c < static_cast<int>(P.size()); ++c) {
        lambda[P[c]] += alpha * (z[c] - lambda[P[c]]);
        if (lambda[P[c]] > 1e-15) {
          keep.push_back(P[c]);
        } else {
          lambda[P[c]] = 0.0;
        }
      }
      P = keep;
    }
  }
  lambda /= lambda.sum();
  if (residual) *residual = (G * lambda).norm();
  return lambda;
}

Certificate validate(const Instance& inst, const CoveringBall& candidate, const ActiveSet& S,
                     const Tolerances& /*tol*/) {
  Certificate cert;
  const Vec& x = candidate.center;
  const double z = candidate.radius;
  const int m = static_cast<int>(inst.size());
  std::vector<double> f(m);
  cert.feasibility_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    f[i] = coverage_value(x, inst.balls[i]);
    cert.feasibility_margin = std::min(cert.feasibility_margin, z - f[i]);
  }
  if (m == 0) cert.feasibility_margin = 0.0;

  if (S.empty()) {
    double fmax = -std::numeric_limits<double>::infinity();
    for (double v : f) fmax = std::max(fmax, v);
    for (int i = 0; i < m; ++i) {
      if (fmax - f[i] <= 1e-7 * (1.0 + std::abs(fmax))) cert.support.push_back(i);
    }
  } else {
    cert.support = S;
  }

  const int s = static_cast<int>(cert.support.size());
  Mat G(inst.dim, s);
  Vec dist(s);
  double tight = 0.0;
  for (int c = 0; c < s; ++c) {
    const int i = cert.support[c];
    G.col(c) = unit_gradient(x, inst.balls[i].center);
    dist[c] = (x - inst.balls[i].center).norm();
    tight = std::max(tight, std::abs(z - f[i]));
  }
  double stationarity = 0.0;
  Vec lambda = simplex_least_squares(G, &stationarity);
  cert.kkt_residual = std::max(stationarity, tight);
  if (s == 0) cert.kkt_residual = std::numeric_limits<double>::infinity();
  if (s > 0) {
    const double dsum = dist.sum();
    cert.barycentric = dsum > 0.0 ? lambda_to_pi(lambda, dist) : lambda;
  }
  cert.accepted = cert.feasibility_margin >= -1e-7 * (1.0 + std::abs(z)) &&
                  cert.kkt_residual <= 1e-6;
  return cert;
}

CoveringBall oracle_subgradient(const Instance& inst, long iters, std::uint64_t seed) {
  double c0 = std::max(instance_diameter(inst), 1e-12);
  Vec x = centroid(inst);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < inst.dim; ++k) x[k] += 1e-3 * c0 * u(rng);
  }
  MaxCoverage mc = max_coverage(inst, x);
  CoveringBall best{x, mc.value};
  // The budget is split into epochs; each restarts the c₀/√t schedule from
  // the best point so far with c₀ shrunk by four.
  constexpr int kEpochs = 10;
  const long per_epoch = std::max(1L, iters / kEpochs);
  long done = 0;
  for (int epoch = 0; epoch < kEpochs && done < iters; ++epoch) {
    x = best.center;
    mc = max_coverage(inst, x);
    const long len = epoch + 1 == kEpochs ? iters - done : std::min(per_epoch, iters - done);
    for (long t = 1; t <= len; ++t) {
      const Vec g = unit_gradient(x, inst.balls[mc.index].center);
      if (g.squaredNorm() == 0.0) break;  // x is the center of the dominating ball
      x -= (c0 / std::sqrt(static_cast<double>(t))) * g;
      mc = max_coverage(inst, x);
      if (mc.value < best.radius) best = {x, mc.value};
    }
    done += len;
    c0 *= 0.25;
  }
  return best;
}

namespace {

struct SubsetSolution {
  bool ok = false;
  Vec x;
  double z = 0.0;
};

// Newton on f_{i_k}(x) − f_{i_1}(x) = 0, k ≥ 2, with x = p_{i_1} + E·t.
SubsetSolution equal_coverage_point(const Instance& inst, const ActiveSet& S, const Mat& E,
                                    const Vec& t0) {
  const int s = static_cast<int>(S.size());
  const Vec& p1 = inst.balls[S[0]].center;
  auto residual = [&](const Vec& t, Vec& F, Mat* J) {
    const Vec x = p1 + E * t;
    const Vec g1 = unit_gradient(x, p1);
    const double f1 = coverage_value(x, inst.balls[S[0]]);
    F.resize(s - 1);
    if (J) J->resize(s - 1, s - 1);
    for (int k = 1; k < s; ++k) {
      const Ball& b = inst.balls[S[k]];
      F[k - 1] = coverage_value(x, b) - f1;
      if (J) J->row(k - 1) = (unit_gradient(x, b.center) - g1).transpose() * E;
    }
  };
  Vec t = t0;
  Vec F;
  Mat J;
  residual(t, F, &J);
  double scale = 1.0;
  for (int k = 0; k < s; ++k) scale = std::max(scale, inst.balls[S[k]].radius);
  for (int it = 0; it < 100; ++it) {
    const double fn = F.norm();
    if (fn <= 1e-13 * scale) break;
    Vec step = J.colPivHouseholderQr().solve(-F);
    if (!step.allFinite()) return {};
    double lambda = 1.0;
    Vec Fn;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      residual(t + lambda * step, Fn, nullptr);
      if (Fn.norm() < fn) {
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) break;
    t += lambda * step;
    residual(t, F, &J);
  }
  if (!(F.norm() <= 1e-12 * scale)) return {};
  SubsetSolution out;
  out.ok = true;
  out.x = p1 + E * t;
  out.z = coverage_value(out.x, inst.balls[S[0]]);
  return out;
}

void for_each_subset(int m, int size, const std::function<void(const ActiveSet&)>& fn) {
  ActiveSet S(size);
  for (int i = 0; i < size; ++i) S[i] = i;
  while (true) {
    fn(S);
    int i = size - 1;
    while (i >= 0 && S[i] == m - size + i) --i;
    if (i < 0) return;
    ++S[i];
    for (int j = i + 1; j < size; ++j) S[j] = S[j - 1] + 1;
  }
}

}  // namespace

CoveringBall oracle_enumerate(const Instance& inst) {
  const int m = static_cast<int>(inst.size());
  const int n = inst.dim;
  if (m > 12 || n > 4) throw Error("oracle_enumerate: requires m <= 12 and n <= 4");
  CoveringBall best;
  best.radius = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto consider = [&](const ActiveSet& S, const Vec& x, double z) {
    const MaxCoverage mc = max_coverage(inst, x);
    if (mc.value > z + 1e-9 * (1.0 + std::abs(z))) return;
    Mat G(n, S.size());
    for (int c = 0; c < static_cast<int>(S.size()); ++c)
      G.col(c) = unit_gradient(x, inst.balls[S[c]].center);
    Mat A(n + 1, S.size());
    A.row(0).setOnes();
    A.bottomRows(n) = G;
    Vec rhs = Vec::Zero(n + 1);
    rhs[0] = 1.0;
    const Vec lambda = A.colPivHouseholderQr().solve(rhs);
    if ((A * lambda - rhs).norm() > 1e-8) return;
    if (lambda.minCoeff() < -1e-9) return;
    if (mc.value < best.radius) best = {x, mc.value};
  };

  for (int s = 1; s <= std::min(m, n + 1); ++s) {
    for_each_subset(m, s, [&](const ActiveSet& S) {
      if (s == 1) {
        consider(S, inst.balls[S[0]].center, inst.balls[S[0]].radius);
        return;
      }
      if (!affinely_independent(inst, S)) return;
      const Vec& p1 = inst.balls[S[0]].center;
      Mat D(n, s - 1);
      for (int k = 1; k < s; ++k) D.col(k - 1) = inst.balls[S[k]].center - p1;
      Eigen::HouseholderQR<Mat> qr(D);
      const Mat E = qr.householderQ() * Mat::Identity(n, s - 1);
      std::vector<Vec> starts;
      Vec weights(s);
      weights.setConstant(1.0 / s);
      starts.push_back(weights);
      for (int k = 0; k < s; ++k) {
        Vec w = Vec::Constant(s, 0.1 / s);
        w[k] += 0.9;
        starts.push_back(w);
      }
      for (int r = 0; r < 8; ++r) {
        Vec w(s);
        for (int k = 0; k < s; ++k) w[k] = -std::log(std::max(unif(rng), 1e-300));
        starts.push_back(w / w.sum());
      }
      for (const Vec& w : starts) {
        Vec y = Vec::Zero(n);
        for (int k = 0; k < s; ++k) y += w[k] * inst.balls[S[k]].center;
        const Vec t0 = E.transpose() * (y - p1);
        SubsetSolution sol = equal_coverage_point(inst, S, E, t0);
        if (sol.ok) consider(S, sol.x, sol.z);
      }
    });
  }
  if (!std::isfinite(best.radius)) throw NumericalError("oracle_enumerate: no certified subset");
  return best;
}

}  // namespace minball
