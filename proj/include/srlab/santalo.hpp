#pragma once

#include "srlab/domain.hpp"
#include "srlab/flow.hpp"
#include "srlab/sampling.hpp"

#include <vector>

namespace srlab {

struct SantaloOptions {
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  Execution exec = Execution::Parallel;
  FlowOptions flow;
  double t_max = 0.0;  // 0: 8 x the domain length scale
};

struct SideEstimate {
  Estimate value;
  std::size_t samples = 0;
  double capped_fraction = 0.0;
  double characteristic_fraction = 0.0;  // boundary side only
};

struct SantaloEstimate {
  Estimate lhs;
  Estimate rhs;
  std::size_t n_interior = 0;
  std::size_t n_boundary = 0;
  double capped_fraction = 0.0;
  double characteristic_fraction = 0.0;
  double discrepancy = 0.0;  // |lhs - rhs| in combined standard errors
  double tolerance = 0.0;    // 3 combined stderrs plus a numeric floor
  bool balanced = false;
};

// omega(M) |S^{k-1}| E[F(lambda) 1{l(-lambda) < t_max}] for each F
std::vector<SideEstimate> estimate_lhs(const Domain& domain, const std::vector<CovectorFunction>& F,
                                       const SantaloOptions& opts);
// sigma-weighted boundary flow integral, importance sampled in <lambda, n>
std::vector<SideEstimate> estimate_rhs(const Domain& domain, const std::vector<CovectorFunction>& F,
                                       const SantaloOptions& opts);
std::vector<SantaloEstimate> santalo_balance(const Domain& domain, const std::vector<CovectorFunction>& F,
                                             const SantaloOptions& opts);

// u on the hemisphere {<u, nu> > 0} of S^{k-1} with density proportional to <u, nu>
Vec sample_inward_direction(Rng& rng, const Vec& nu);

struct VisibilityReport {
  std::vector<double> theta;      // per sampled point
  std::vector<double> theta_opt;  // optimal visibility, when cut hooks exist
  double theta_inf = 1.0;
  double theta_opt_inf = 1.0;
  // capped trajectories counted visible instead of invisible
  double theta_inf_capped_visible = 1.0;
  double theta_inf_stderr = 0.0;
  double capped_fraction = 0.0;
  bool cut_known = false;
  std::size_t n_points = 0;
  std::size_t n_fiber = 0;
};

VisibilityReport visibility_angles(const Domain& domain, const std::vector<Vec>& points, std::size_t n_fiber,
                                   std::uint64_t seed, const FlowOptions& flow = {}, double t_max = 0.0,
                                   Execution exec = Execution::Parallel);

double combined_tolerance(const Estimate& a, const Estimate& b);

}  // namespace srlab
