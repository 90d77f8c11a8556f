#pragma once

#include "srlab/model.hpp"

#include <functional>
#include <optional>

namespace srlab {

struct ReductionCertificate {
  double tolerance = 1e-9;
  std::size_t samples = 0;
  double h1_residual = 0.0;          // max |v'| at v = 0
  double h1_dynamic = 0.0;           // max |v(t)| per unit length along reduced flows
  double h2_residual = 0.0;          // max |sum_ij u_i d_ij^j|
  std::optional<double> skew_residual;             // max |d_ij^l + d_il^j|, Hopf models
  std::optional<double> trace_residual;            // max |tr ad X_i|, Carnot models
  std::optional<double> rotated_frame_h2_residual;  // H2 with a twisted vertical frame
  bool h1_pass = false;
  bool h2_pass = false;
};

ReductionCertificate check_H1(const Model& model, std::size_t n, std::uint64_t seed, double tol = 1e-9);
ReductionCertificate check_H2(const Model& model, std::size_t n, std::uint64_t seed, double tol = 1e-9);
// both hypotheses plus the frame-rotation spot check
ReductionCertificate certify_reduction(std::shared_ptr<const Model> model, std::size_t n, std::uint64_t seed,
                                       double tol = 1e-9);

struct FiberScheme {
  enum class Kind { Auto, Deterministic, MonteCarlo };
  Kind kind = Kind::Auto;
  int nodes = 64;  // per angle
  std::size_t mc_samples = 200000;
  std::uint64_t seed = 1;
  bool verify = false;  // rerun with half the nodes and require agreement
  double verify_tol = 1e-8;
};

// Integral over the unit sphere S^{k-1} of R^k against the round measure.
// Deterministic product-angle Gauss-Legendre for k <= 4 (polar axis along
// `pole` when given), Monte-Carlo otherwise.
Estimate fiber_quadrature(int k, const std::function<double(const Vec& u)>& f, const FiberScheme& scheme = {},
                          const Vec* pole = nullptr);

// Same over the reduced unit covectors at q, integrand in frame coordinates.
Estimate fiber_quadrature(const Model& model, const Vec& q, const std::function<double(const FrameCovector&)>& f,
                          const FiberScheme& scheme = {}, const Vec* pole = nullptr);

}  // namespace srlab
