#include "srlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace srlab {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <class Rhs>
struct Stepper {
  Rhs rhs;
  std::array<Vec, 7> k;

  // One trial step from (y, k1 = k[0]); returns the scaled error norm.
  double attempt(const Vec& y, double h, Vec& y1, const FlowOptions& o) {
    Vec tmp;
    tmp = y + h * a21 * k[0];
    rhs(tmp, k[1]);
    tmp = y + h * (a31 * k[0] + a32 * k[1]);
    rhs(tmp, k[2]);
    tmp = y + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]);
    rhs(tmp, k[3]);
    tmp = y + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]);
    rhs(tmp, k[4]);
    tmp = y + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] + a65 * k[4]);
    rhs(tmp, k[5]);
    y1 = y + h * (a71 * k[0] + a73 * k[2] + a74 * k[3] + a75 * k[4] + a76 * k[5]);
    rhs(y1, k[6]);
    Vec err = h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] + e7 * k[6]);
    double s = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = o.atol + o.rtol * std::max(std::abs(y(i)), std::abs(y1(i)));
      const double r = err(i) / sc;
      s += r * r;
    }
    return std::sqrt(s / static_cast<double>(y.size()));
  }

  void dense(const Vec& y, const Vec& y1, double h, std::array<Vec, 5>& rc) const {
    rc[0] = y;
    rc[1] = y1 - y;
    rc[2] = h * k[0] - rc[1];
    rc[3] = rc[1] - h * k[6] - rc[2];
    rc[4] = h * (d1 * k[0] + d3 * k[2] + d4 * k[3] + d5 * k[4] + d6 * k[5] + d7 * k[6]);
  }
};

Vec dense_eval(const std::array<Vec, 5>& rc, double th) {
  const double t1 = 1.0 - th;
  return rc[0] + th * (rc[1] + t1 * (rc[2] + th * (rc[3] + t1 * rc[4])));
}

struct CanonicalRhs {
  const Model* model;
  int m;
  void operator()(const Vec& y, Vec& dy) const {
    Vec x = y.head(m), p = y.tail(m), gx, gp;
    model->hamiltonian_gradient(x, p, gx, gp);
    dy.resize(2 * m);
    dy.head(m) = gp;
    dy.tail(m) = -gx;
  }
};

double step_factor(double err) {
  if (err == 0.0) return 5.0;
  return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
}

void normalize_y(const Model& model, Vec& y) {
  const int m = model.chart_dim();
  Vec x = y.head(m), p = y.tail(m);
  model.normalize_state(x, p);
  y.head(m) = x;
  y.tail(m) = p;
}

}  // namespace

Vec StepView::at(double t) const {
  const double th = h > 0.0 ? (t - t0) / h : 0.0;
  return dense_eval(*dense, th);
}

Vec canonical_state(const Model& model, const FrameCovector& lambda) {
  const int m = model.chart_dim();
  Vec y(2 * m);
  y.head(m) = lambda.q;
  y.tail(m) = model.covector(lambda);
  return y;
}

FrameCovector negate(const FrameCovector& lambda) { return FrameCovector{lambda.q, -lambda.u, -lambda.v}; }

RunResult run_canonical(const Model& model, const Vec& y_start, double t_max, const FlowOptions& opts,
                        const Domain* domain, const std::function<void(const StepView&)>& on_step) {
  const int m = model.chart_dim();
  Stepper<CanonicalRhs> st{CanonicalRhs{&model, m}, {}};
  RunResult res;
  Vec y = y_start;
  normalize_y(model, y);
  st.rhs(y, st.k[0]);
  const double scale = domain ? domain->length_scale() : model.length_scale();
  const double h_max = opts.h_max_factor * scale;
  double t = 0.0;
  double h = std::min({opts.h_init * scale, h_max, t_max});
  auto level_at = [&](const Vec& yy) { return domain->level(yy.head(m)); };
  bool armed = domain ? level_at(y) > opts.event_tol : false;
  if (domain && !armed && level_at(y) < -opts.event_tol) {
    // started outside: exit at once
    res.exited = true;
    res.t_end = 0.0;
    res.y_end = y;
    return res;
  }
  Vec y1;
  std::array<Vec, 5> rc;
  while (t < t_max) {
    if (res.steps >= opts.max_steps) throw NumericError("geodesic integration exceeded the step budget");
    h = std::min(h, t_max - t);
    const double err = st.attempt(y, h, y1, opts);
    if (!(err <= 1.0)) {
      if (!std::isfinite(err)) {
        h *= 0.2;
      } else {
        h *= step_factor(err);
      }
      if (h < opts.h_min) throw NumericError("step-size underflow in geodesic integration");
      continue;
    }
    ++res.steps;
    st.dense(y, y1, h, rc);
    if (model.chart() == ChartKind::Euclidean) {
      try {
        model.check_chart(y1.head(m));
      } catch (const DomainError&) {
        throw NumericError("geodesic left the chart of model " + model.id());
      }
    }
    if (domain) {
      // probe the dense output for the first contact with the boundary
      const int ns = std::max(1, opts.event_samples);
      double th_prev = 0.0, U_prev = level_at(y);
      double exit_lo = -1.0, exit_hi = -1.0;
      bool grazing = false;
      for (int j = 1; j <= ns; ++j) {
        const double th = static_cast<double>(j) / ns;
        const double Uj = j == ns ? level_at(y1) : level_at(dense_eval(rc, th));
        if (!armed) {
          if (Uj < -opts.event_tol) {
            exit_lo = th_prev;
            exit_hi = th;
            break;
          }
          if (Uj > opts.event_tol) armed = true;
        } else {
          if (Uj < 0.0) {
            exit_lo = th_prev;
            exit_hi = th;
            break;
          }
          if (Uj <= opts.event_tol) {
            exit_lo = exit_hi = th;
            grazing = true;
            break;
          }
        }
        th_prev = th;
        U_prev = Uj;
      }
      (void)U_prev;
      if (exit_hi >= 0.0) {
        double th_star = exit_hi;
        if (!grazing) {
          double lo = exit_lo, hi = exit_hi;
          if (level_at(dense_eval(rc, lo)) < 0.0) {
            hi = lo;
          } else {
            for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
              const double mid = 0.5 * (lo + hi);
              if (level_at(dense_eval(rc, mid)) >= 0.0)
                lo = mid;
              else
                hi = mid;
            }
          }
          th_star = 0.5 * (lo + hi);
        }
        // polish with fresh steps from the step start
        double tau = th_star * h;
        Vec ye = dense_eval(rc, th_star);
        if (tau > 0.0) {
          Stepper<CanonicalRhs> fresh{CanonicalRhs{&model, m}, {}};
          fresh.k[0] = st.k[0];
          const double tau_lo = exit_lo * h, tau_hi = exit_hi * h;
          FlowOptions loose = opts;
          for (int it = 0; it < 4; ++it) {
            fresh.attempt(y, tau, ye, loose);
            if (grazing) break;
            const double U = level_at(ye);
            if (std::abs(U) < 1e-3 * opts.event_tol) break;
            Vec gx, gp;
            model.hamiltonian_gradient(ye.head(m), ye.tail(m), gx, gp);
            const double dU = domain->level_gradient(ye.head(m)).dot(gp);
            if (dU == 0.0 || !std::isfinite(dU)) break;
            double next = std::clamp(tau - U / dU, tau_lo, tau_hi);
            if (std::abs(next - tau) < 1e-15) break;
            tau = next;
          }
        }
        normalize_y(model, ye);
        res.exited = true;
        res.grazing = grazing;
        res.t_end = t + tau;
        res.y_end = ye;
        if (on_step && tau > 0.0) {
          StepView v{t, t + tau, h, &y, &ye, &rc};
          on_step(v);
        }
        return res;
      }
    }
    if (on_step) {
      StepView v{t, t + h, h, &y, &y1, &rc};
      on_step(v);
    }
    t += h;
    y = y1;
    if (model.chart() == ChartKind::UnitSphere) {
      normalize_y(model, y);
      st.rhs(y, st.k[0]);
    } else {
      st.k[0] = st.k[6];
    }
    h = std::min(h * step_factor(err), h_max);
  }
  res.capped = domain != nullptr;
  res.t_end = t;
  res.y_end = y;
  return res;
}

GeodesicTrace integrate_geodesic(const Model& model, const FrameCovector& lambda0, double t_max,
                                 const FlowOptions& opts, const Domain* domain) {
  if (std::abs(lambda0.u.squaredNorm() - 1.0) > 1e-12)
    throw PreconditionError("integrate_geodesic: initial covector must satisfy |u| = 1");
  const int m = model.chart_dim();
  GeodesicTrace tr;
  Vec y0 = canonical_state(model, lambda0);
  auto record = [&](double t, const Vec& y) {
    FrameCovector s = model.frame_coords(y.head(m), y.tail(m));
    tr.times.push_back(t);
    tr.h_drift = std::max(tr.h_drift, std::abs(s.u.squaredNorm() - 1.0));
    if (s.v.size() > 0) tr.v_drift = std::max(tr.v_drift, s.v.cwiseAbs().maxCoeff());
    tr.states.push_back(std::move(s));
  };
  record(0.0, y0);
  RunResult r = run_canonical(model, y0, t_max, opts, domain, [&](const StepView& v) {
    if (v.t1 > tr.times.back()) record(v.t1, *v.y1);
  });
  if (r.exited) tr.exit_event = ExitEvent{r.t_end, r.y_end.head(m), r.grazing};
  return tr;
}

GeodesicTrace integrate_frame_route(const Model& model, const FrameCovector& lambda0, double t_max,
                                    const FlowOptions& opts) {
  if (!model.has_global_frame())
    throw PreconditionError("frame-coordinate route needs a model with global frames");
  if (std::abs(lambda0.u.squaredNorm() - 1.0) > 1e-12)
    throw PreconditionError("integrate_frame_route: initial covector must satisfy |u| = 1");
  const int m = model.chart_dim(), k = model.k(), r = model.r();
  auto rhs = [&model, m, k, r](const Vec& y, Vec& dy) {
    Vec q = y.head(m), u = y.segment(m, k), v = y.tail(r);
    if (model.chart() == ChartKind::UnitSphere) q.normalize();
    BracketTensors bt = model.bracket_tensors(q);
    dy.resize(m + k + r);
    dy.head(m) = model.horizontal_frame(q) * u;
    for (int i = 0; i < k; ++i) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) {
        double w = 0.0;
        for (int l = 0; l < k; ++l) w += bt.B(j, i, l) * u(l);
        for (int l = 0; l < r; ++l) w += bt.C(j, i, l) * v(l);
        s += u(j) * w;
      }
      dy(m + i) = s;
    }
    for (int j = 0; j < r; ++j) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) {
        double w = 0.0;
        for (int l = 0; l < k; ++l) w += bt.A(i, j, l) * u(l);
        for (int l = 0; l < r; ++l) w += bt.D(i, j, l) * v(l);
        s += u(i) * w;
      }
      dy(m + k + j) = s;
    }
  };
  Stepper<decltype(rhs)> st{rhs, {}};
  Vec y(m + k + r);
  y << lambda0.q, lambda0.u, lambda0.v;
  GeodesicTrace tr;
  auto record = [&](double t, const Vec& yy) {
    FrameCovector s{yy.head(m), yy.segment(m, k), yy.tail(r)};
    tr.times.push_back(t);
    tr.h_drift = std::max(tr.h_drift, std::abs(s.u.squaredNorm() - 1.0));
    if (r > 0) tr.v_drift = std::max(tr.v_drift, s.v.cwiseAbs().maxCoeff());
    tr.states.push_back(std::move(s));
  };
  record(0.0, y);
  st.rhs(y, st.k[0]);
  double t = 0.0, h = std::min({opts.h_init, opts.h_max_factor * model.length_scale(), t_max});
  Vec y1;
  std::size_t steps = 0;
  while (t < t_max) {
    if (++steps > opts.max_steps) throw NumericError("frame-route integration exceeded the step budget");
    h = std::min(h, t_max - t);
    const double err = st.attempt(y, h, y1, opts);
    if (!(err <= 1.0)) {
      h *= std::isfinite(err) ? step_factor(err) : 0.2;
      if (h < opts.h_min) throw NumericError("step-size underflow in frame-route integration");
      continue;
    }
    t += h;
    y = y1;
    if (model.chart() == ChartKind::UnitSphere) {
      y.head(m).normalize();
      st.rhs(y, st.k[0]);
    } else {
      st.k[0] = st.k[6];
    }
    record(t, y);
    h = std::min(h * step_factor(err), opts.h_max_factor * model.length_scale());
  }
  return tr;
}

double default_t_max(const Domain& domain) { return 8.0 * domain.length_scale(); }

ExitLength exit_length(const Domain& domain, const FrameCovector& lambda, double t_max, const FlowOptions& opts) {
  const Model& model = domain.model();
  if (domain.level(lambda.q) < -1e-8) throw PreconditionError("exit_length: base point is outside the domain");
  if (std::abs(lambda.u.squaredNorm() - 1.0) > 1e-12)
    throw PreconditionError("exit_length: covector must satisfy |u| = 1");
  RunResult r = run_canonical(model, canonical_state(model, lambda), t_max, opts, &domain, nullptr);
  ExitLength out;
  out.capped = !r.exited;
  out.length = r.exited ? r.t_end : kInf;
  out.grazing = r.grazing;
  out.y_exit = r.y_end;
  return out;
}

ExitData chord_data(const Domain& domain, const FrameCovector& lambda, double t_max, const FlowOptions& opts) {
  ExitLength f = exit_length(domain, lambda, t_max, opts);
  ExitLength b = exit_length(domain, negate(lambda), t_max, opts);
  ExitData d;
  d.l_fwd = f.length;
  d.l_bwd = b.length;
  d.capped_fwd = f.capped;
  d.capped_bwd = b.capped;
  d.L = d.l_fwd + d.l_bwd;
  d.grazing = f.grazing || b.grazing;
  const Model& model = domain.model();
  const bool reduced = lambda.v.size() == 0 || lambda.v.cwiseAbs().maxCoeff() <= 1e-8;
  if (model.has_cut_hook() && reduced) {
    d.cut_known = true;
    d.l_tilde = std::min(d.l_fwd, model.cut_length(lambda));
  } else {
    d.l_tilde = d.l_fwd;
  }
  return d;
}

PathIntegral integrate_along(const Domain& domain, const FrameCovector& lambda, const CovectorFunction& F,
                             double t_max, const FlowOptions& opts) {
  const Model& model = domain.model();
  const int m = model.chart_dim();
  // 3-point Gauss-Legendre per accepted step on the dense output
  static const double gx = std::sqrt(0.6);
  PathIntegral out;
  auto f = [&](const Vec& y) { return F(y.head(m), y.tail(m)); };
  RunResult r = run_canonical(model, canonical_state(model, lambda), t_max, opts, &domain, [&](const StepView& v) {
    const double a = v.t0, b = v.t1, mid = 0.5 * (a + b), half = 0.5 * (b - a);
    out.integral += half * (5.0 / 9.0 * f(v.at(mid - gx * half)) + 8.0 / 9.0 * f(v.at(mid)) +
                            5.0 / 9.0 * f(v.at(mid + gx * half)));
  });
  out.length = r.exited ? r.t_end : t_max;
  out.capped = !r.exited;
  return out;
}

void write_trace_csv(std::ostream& os, const GeodesicTrace& trace) {
  if (trace.states.empty()) return;
  const auto& s0 = trace.states.front();
  os << "t";
  for (int i = 0; i < s0.q.size(); ++i) os << ",q_" << i + 1;
  for (int i = 0; i < s0.u.size(); ++i) os << ",u_" << i + 1;
  for (int i = 0; i < s0.v.size(); ++i) os << ",v_" << i + 1;
  os << ",H\n";
  os.precision(17);
  for (std::size_t n = 0; n < trace.states.size(); ++n) {
    const auto& s = trace.states[n];
    os << trace.times[n];
    for (int i = 0; i < s.q.size(); ++i) os << ',' << s.q(i);
    for (int i = 0; i < s.u.size(); ++i) os << ',' << s.u(i);
    for (int i = 0; i < s.v.size(); ++i) os << ',' << s.v(i);
    os << ',' << 0.5 * s.u.squaredNorm() << '\n';
  }
}

}  // namespace srlab
