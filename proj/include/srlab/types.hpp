#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace srlab {

// Chart points live in R^m with m <= kMaxChart; canonical states (x, p) in R^{2m}.
inline constexpr int kMaxChart = 16;
inline constexpr int kMaxState = 2 * kMaxChart;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxState, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxChart, kMaxChart>;

using Rng = std::mt19937_64;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// point outside the chart, wrong dimensions
class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// step-size underflow, chart escape, non-convergent iterations
class NumericError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A covector in frame coordinates: u_i = <lambda, X_i>, v_j = <lambda, Z_j>.
struct FrameCovector {
  Vec q;
  Vec u;
  Vec v;
};

// |S^d|, the d-dimensional area of the unit sphere in R^{d+1}.
double sphere_area(int d);

// a Monte-Carlo (or deterministic, std_error = 0) estimate
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

}  // namespace srlab
