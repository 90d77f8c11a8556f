#pragma once

#include "srlab/domain.hpp"
#include "srlab/model.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace srlab {

struct FlowOptions {
  double rtol = 1e-11;
  double atol = 1e-12;
  double h_init = 1e-2;
  double h_max_factor = 0.1;  // maximal step as a fraction of the length scale
  double h_min = 1e-13;
  std::size_t max_steps = 500000;
  double event_tol = 1e-10;  // |U| at a refined exit
  int event_samples = 8;     // dense-output probes per step for sign changes
};

struct ExitEvent {
  double t = 0.0;
  Vec q;
  bool grazing = false;
};

struct GeodesicTrace {
  std::vector<double> times;
  std::vector<FrameCovector> states;
  double h_drift = 0.0;  // max |2H(t) - 2H(0)|
  double v_drift = 0.0;  // max |v(t)|
  std::optional<ExitEvent> exit_event;
};

struct ExitData {
  double l_fwd = 0.0;
  double l_bwd = 0.0;
  double L = 0.0;
  double l_tilde = 0.0;
  bool capped_fwd = false;
  bool capped_bwd = false;
  bool cut_known = false;
  bool grazing = false;
};

// One accepted step with its dense output, as seen by observers.
struct StepView {
  double t0 = 0.0;
  double t1 = 0.0;  // end of the usable part (exit time on the final step)
  double h = 0.0;   // full step size; dense output is valid on [t0, t0 + h]
  const Vec* y0 = nullptr;
  const Vec* y1 = nullptr;  // state at t0 + h (or at the exit on the final step)
  const std::array<Vec, 5>* dense = nullptr;
  Vec at(double t) const;
};

struct RunResult {
  double t_end = 0.0;
  Vec y_end;
  bool exited = false;
  bool capped = false;
  bool grazing = false;
  std::size_t steps = 0;
};

// Integrates Hamilton's equations in canonical chart coordinates y = (x, p),
// optionally stopping at the first exit from a domain.
RunResult run_canonical(const Model& model, const Vec& y0, double t_max, const FlowOptions& opts,
                        const Domain* domain, const std::function<void(const StepView&)>& on_step);

Vec canonical_state(const Model& model, const FrameCovector& lambda);
FrameCovector negate(const FrameCovector& lambda);

GeodesicTrace integrate_geodesic(const Model& model, const FrameCovector& lambda0, double t_max,
                                 const FlowOptions& opts = {}, const Domain* domain = nullptr);

// Same extremal integrated in frame coordinates (q, u, v) driven by the
// bracket tensors; needs a model with global frames.
GeodesicTrace integrate_frame_route(const Model& model, const FrameCovector& lambda0, double t_max,
                                    const FlowOptions& opts = {});

double default_t_max(const Domain& domain);

struct ExitLength {
  double length = 0.0;
  bool capped = false;
  bool grazing = false;
  Vec y_exit;
};

ExitLength exit_length(const Domain& domain, const FrameCovector& lambda, double t_max,
                       const FlowOptions& opts = {});
ExitData chord_data(const Domain& domain, const FrameCovector& lambda, double t_max,
                    const FlowOptions& opts = {});

// F evaluated on the canonical state (x, p)
using CovectorFunction = std::function<double(const Vec& x, const Vec& p)>;

struct PathIntegral {
  double integral = 0.0;
  double length = 0.0;
  bool capped = false;
};

// int_0^{l(lambda)} F(phi_t lambda) dt, 3-point Gauss per step on the dense output
PathIntegral integrate_along(const Domain& domain, const FrameCovector& lambda, const CovectorFunction& F,
                             double t_max, const FlowOptions& opts = {});

// header `t, q_1.., u_1.., v_1.., H`, one row per accepted step
void write_trace_csv(std::ostream& os, const GeodesicTrace& trace);

}  // namespace srlab
