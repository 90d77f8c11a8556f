#pragma once

#include "srlab/functions.hpp"
#include "srlab/reduction.hpp"
#include "srlab/santalo.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>

namespace srlab {

// sharp constant of the 1D L^p Poincare inequality on [0, 1] is pi_p^p
double pi_p(double p);
// Gamma(k/2 + p/2) / (2 Gamma((1+p)/2) pi^{(k-1)/2})
double hardy_constant(double p, int k);
// same constant written through |S^{k-1}|
double hardy_constant_alt(double p, int k);
// 2 pi |S^{k-1}| / |S^k|
double isoperimetric_constant(int k);

// log-density of a reweighted volume omega' = e^phi omega
using VolumeWeight = std::function<double(const Vec& q)>;

struct RadiiEntry {
  double p = 2.0;
  Estimate inv_R_p;  // int 1/L^p over the reduced fiber
  Estimate inv_r_p;  // int 1/l^p
  bool on_boundary = false;  // 1/r^p is infinite there
};

RadiiEntry radii(const Domain& domain, const Vec& q, double p, const FiberScheme& scheme = {},
                 const FlowOptions& flow = {}, double t_max = 0.0);

struct InequalityReport {
  std::string name;
  std::string test_function;
  Estimate lhs;
  Estimate rhs;
  Estimate ratio;
  int k = 0;
  double p = 2.0;
  double pi_p = 0.0;
  double C_pk = 0.0;
  double C = 0.0;
  double alpha = 1.0;
  bool available = true;
  bool pass = false;  // ratio >= 1 - 3 stderr
  std::string note;
};

struct HardyOptions {
  std::size_t n = 20000;
  std::uint64_t seed = 1;
  Execution exec = Execution::Parallel;
  FlowOptions flow;
  double t_max = 0.0;
  double collar = 1e-3;  // excluded boundary layer, in units of the length scale
  std::size_t boundary_checks = 256;
  double boundary_tol = 1e-9;
  VolumeWeight phi;
};

// [0]: bound through R (Poincare), [1]: bound through r (Hardy)
std::array<InequalityReport, 2> hardy_check(const Domain& domain, const TestFunction& f, double p,
                                            const HardyOptions& opts = {});

struct Lambda1Bound {
  double value = 0.0;  // k pi^2 / L_sup^2 from the sampled L_sup
  double L_sup = 0.0;
  std::size_t samples = 0;
  std::size_t capped = 0;
  std::optional<double> analytic_L;
  std::optional<double> analytic_value;
  // sampled L_sup underestimates the supremum, so value overestimates the bound
  bool empirical = true;
};

Lambda1Bound lambda1_lower_bound(const Domain& domain, std::size_t n, std::uint64_t seed = 1,
                                 const FlowOptions& flow = {}, double t_max = 0.0,
                                 Execution exec = Execution::Parallel);

struct IsoperimetricOptions {
  std::size_t n_boundary = 4000;
  std::size_t n_points = 16;
  std::size_t n_fiber = 64;
  std::uint64_t seed = 1;
  Execution exec = Execution::Parallel;
  FlowOptions flow;
  double t_max = 0.0;
  VolumeWeight phi;
};

struct IsoperimetricResult {
  // [0]: theta / l, [1]: optimal theta / reduced diameter
  std::array<InequalityReport, 2> reports;
  VisibilityReport visibility;
  Estimate sigma;
  Estimate omega;
  double l_sup_empirical = 0.0;
  double diam_r_empirical = 0.0;
  std::optional<double> l_analytic;
  std::optional<double> diam_r_analytic;
};

IsoperimetricResult isoperimetric_check(const Domain& domain, const IsoperimetricOptions& opts = {});

}  // namespace srlab
