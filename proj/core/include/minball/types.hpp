#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace minball {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Ball {
  Vec center;
  double radius = 0.0;
};

struct Instance {
  int dim = 0;
  std::vector<Ball> balls;

  std::size_t size() const { return balls.size(); }
};

struct CoveringBall {
  Vec center;
  double radius = 0.0;
};

// Indices into an Instance.  Solvers keep them ordered by non-increasing
// radius (ties by index) because the conic paths are built from the first
// and last members.
using ActiveSet = std::vector<int>;

// Numerical tolerances shared by every module.  All of them are absolute
// factors that get scaled by (1 + magnitude) at the point of use.
struct Tolerances {
  double radius_equal = 1e-9;
  double activity = 1e-7;
  double rank = 1e-10;
  double barycentric = 1e-9;
  double paraboloid = 1e-8;
  double tangent = 1e-12;
  double kkt_residual = 1e-8;
};

// Step lengths may be unbounded; this keeps "no limit" distinct from any
// finite float so that min() selections never compare against a fake value.
class Step {
 public:
  static Step unbounded() { return Step(); }
  static Step finite(double v) { return Step(v); }

  bool is_finite() const { return value_.has_value(); }
  double value() const { return *value_; }

  friend bool operator<(const Step& a, const Step& b) {
    if (!a.is_finite()) return false;
    if (!b.is_finite()) return true;
    return a.value() < b.value();
  }

 private:
  Step() = default;
  explicit Step(double v) : value_(v) {}
  std::optional<double> value_;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class AssumptionError : public Error {
 public:
  AssumptionError(const std::string& what, int j, int k) : Error(what), j(j), k(k) {}
  int j;
  int k;
};

class EmptyIntersectionError : public Error {
 public:
  EmptyIntersectionError(int k, double h_hat, double eps, double rho);
  int k;
  double h_hat;
  double eps;
  double rho;
};

class DependentSetError : public Error {
 public:
  using Error::Error;
};

class ChainedParaboloidError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class IterationLimitError : public Error {
 public:
  IterationLimitError(const std::string& what, CoveringBall best, int iterations)
      : Error(what), best(std::move(best)), iterations(iterations) {}
  CoveringBall best;
  int iterations;
};

}  // namespace minball
