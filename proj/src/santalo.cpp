#include "srlab/santalo.hpp"

#include <algorithm>
#include <cmath>

namespace srlab {

namespace {

constexpr std::uint64_t kStreamInterior = 11;
constexpr std::uint64_t kStreamBoundary = 12;
constexpr std::uint64_t kStreamVisibility = 13;

double t_max_for(const Domain& domain, double t_max) { return t_max > 0.0 ? t_max : default_t_max(domain); }

struct Sample {
  std::vector<double> values;
  bool capped = false;
  bool characteristic = false;
};

std::vector<SideEstimate> summarize(const std::vector<Sample>& samples, std::size_t nf) {
  std::vector<SideEstimate> out(nf);
  std::size_t capped = 0, chr = 0;
  for (const auto& s : samples) {
    capped += s.capped;
    chr += s.characteristic;
  }
  std::vector<double> col(samples.size());
  for (std::size_t j = 0; j < nf; ++j) {
    for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i].values[j];
    out[j].value = mean_estimate(col);
    out[j].samples = samples.size();
    out[j].capped_fraction = samples.empty() ? 0.0 : double(capped) / samples.size();
    out[j].characteristic_fraction = samples.empty() ? 0.0 : double(chr) / samples.size();
  }
  return out;
}

}  // namespace

Vec sample_inward_direction(Rng& rng, const Vec& nu) {
  const int k = static_cast<int>(nu.size());
  if (k == 1) return nu;
  const double V = uniform01(rng);
  const double u1 = std::sqrt(std::max(0.0, 1.0 - std::pow(V, 2.0 / (k - 1))));
  Vec w = standard_normal(rng, k);
  w -= w.dot(nu) * nu;
  const double wn = w.norm();
  if (wn == 0.0) return nu;
  return u1 * nu + std::sqrt(std::max(0.0, 1.0 - u1 * u1)) * (w / wn);
}

std::vector<SideEstimate> estimate_lhs(const Domain& domain, const std::vector<CovectorFunction>& F,
                                       const SantaloOptions& opts) {
  const Model& model = domain.model();
  const auto vol = domain.volume();
  if (!vol) throw PreconditionError("estimate_lhs: domain " + domain.id() + " has no deterministic volume");
  if (opts.n == 0) throw PreconditionError("estimate_lhs: n must be positive");
  const int k = model.k(), m = model.chart_dim();
  const double scale = *vol * sphere_area(k - 1);
  const double tm = t_max_for(domain, opts.t_max);
  auto samples = map_samples<Sample>(opts.n, opts.seed, kStreamInterior, opts.exec, [&](Rng& rng, std::size_t) {
    Sample s;
    FrameCovector lam{domain.sample_interior(rng), uniform_on_sphere(rng, k), Vec::Zero(model.r())};
    const ExitLength back = exit_length(domain, negate(lam), tm, opts.flow);
    s.capped = back.capped;
    s.values.assign(F.size(), 0.0);
    if (!back.capped) {
      const Vec y = canonical_state(model, lam);
      for (std::size_t j = 0; j < F.size(); ++j) s.values[j] = scale * F[j](y.head(m), y.tail(m));
    }
    return s;
  });
  return summarize(samples, F.size());
}

std::vector<SideEstimate> estimate_rhs(const Domain& domain, const std::vector<CovectorFunction>& F,
                                       const SantaloOptions& opts) {
  const Model& model = domain.model();
  if (opts.n == 0) throw PreconditionError("estimate_rhs: n must be positive");
  const int k = model.k(), m = model.chart_dim();
  const double fiber = sphere_area(k) / (2.0 * kPi);
  const double tm = t_max_for(domain, opts.t_max);
  static const double gx = std::sqrt(0.6);
  auto samples = map_samples<Sample>(opts.n, opts.seed, kStreamBoundary, opts.exec, [&](Rng& rng, std::size_t) {
    Sample s;
    s.values.assign(F.size(), 0.0);
    const BoundaryPoint b = domain.sample_boundary(rng);
    const HorizontalNormal nh = horizontal_normal(domain, b.q);
    if (nh.characteristic) {
      s.characteristic = true;
      return s;
    }
    const double w = b.area_weight * sigma_factor(domain, b.q) * fiber;
    FrameCovector lam{b.q, sample_inward_direction(rng, nh.frame), Vec::Zero(model.r())};
    std::vector<double> acc(F.size(), 0.0);
    RunResult r = run_canonical(model, canonical_state(model, lam), tm, opts.flow, &domain, [&](const StepView& v) {
      const double a = v.t0, c = v.t1, mid = 0.5 * (a + c), half = 0.5 * (c - a);
      const Vec y0 = v.at(mid - gx * half), y1 = v.at(mid), y2 = v.at(mid + gx * half);
      for (std::size_t j = 0; j < F.size(); ++j)
        acc[j] += half * (5.0 / 9.0 * F[j](y0.head(m), y0.tail(m)) + 8.0 / 9.0 * F[j](y1.head(m), y1.tail(m)) +
                          5.0 / 9.0 * F[j](y2.head(m), y2.tail(m)));
    });
    s.capped = !r.exited;
    for (std::size_t j = 0; j < F.size(); ++j) s.values[j] = w * acc[j];
    return s;
  });
  return summarize(samples, F.size());
}

double combined_tolerance(const Estimate& a, const Estimate& b) {
  const double se = std::hypot(a.std_error, b.std_error);
  return 3.0 * se + 1e-6 * std::max(std::abs(a.value), std::abs(b.value));
}

std::vector<SantaloEstimate> santalo_balance(const Domain& domain, const std::vector<CovectorFunction>& F,
                                             const SantaloOptions& opts) {
  const auto lhs = estimate_lhs(domain, F, opts);
  const auto rhs = estimate_rhs(domain, F, opts);
  std::vector<SantaloEstimate> out(F.size());
  for (std::size_t j = 0; j < F.size(); ++j) {
    auto& e = out[j];
    e.lhs = lhs[j].value;
    e.rhs = rhs[j].value;
    e.n_interior = lhs[j].samples;
    e.n_boundary = rhs[j].samples;
    e.capped_fraction = lhs[j].capped_fraction;
    e.characteristic_fraction = rhs[j].characteristic_fraction;
    e.tolerance = combined_tolerance(e.lhs, e.rhs);
    const double diff = std::abs(e.lhs.value - e.rhs.value);
    const double se = std::hypot(e.lhs.std_error, e.rhs.std_error);
    e.discrepancy = se > 0.0 ? diff / se : (diff > 0.0 ? kInf : 0.0);
    e.balanced = diff <= e.tolerance;
  }
  return out;
}

VisibilityReport visibility_angles(const Domain& domain, const std::vector<Vec>& points, std::size_t n_fiber,
                                   std::uint64_t seed, const FlowOptions& flow, double t_max, Execution exec) {
  if (points.empty() || n_fiber == 0) throw PreconditionError("visibility_angles: need points and fiber samples");
  const Model& model = domain.model();
  const int k = model.k();
  const double tm = t_max_for(domain, t_max);
  const double cut_tol = 1e-8 * domain.length_scale();
  struct PointStats {
    std::size_t visible = 0, opt = 0, capped = 0;
  };
  auto stats = map_samples<PointStats>(points.size(), seed, kStreamVisibility, exec, [&](Rng& rng, std::size_t i) {
    PointStats s;
    for (std::size_t j = 0; j < n_fiber; ++j) {
      const FrameCovector back = negate(FrameCovector{points[i], uniform_on_sphere(rng, k), Vec::Zero(model.r())});
      const ExitLength e = exit_length(domain, back, tm, flow);
      if (e.capped) {
        ++s.capped;
        continue;
      }
      ++s.visible;
      if (model.has_cut_hook() && e.length <= model.cut_length(back) + cut_tol) ++s.opt;
    }
    return s;
  });
  VisibilityReport rep;
  rep.cut_known = model.has_cut_hook();
  rep.n_points = points.size();
  rep.n_fiber = n_fiber;
  std::size_t capped = 0;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double th = double(stats[i].visible) / n_fiber;
    rep.theta.push_back(th);
    rep.theta_opt.push_back(rep.cut_known ? double(stats[i].opt) / n_fiber : std::nan(""));
    rep.theta_inf_capped_visible =
        std::min(i == 0 ? 1.0 : rep.theta_inf_capped_visible, double(stats[i].visible + stats[i].capped) / n_fiber);
    if (th < rep.theta[worst]) worst = i;
    capped += stats[i].capped;
  }
  rep.theta_inf = rep.theta[worst];
  rep.theta_inf_stderr = std::sqrt(rep.theta_inf * (1.0 - rep.theta_inf) / n_fiber);
  rep.theta_opt_inf = rep.cut_known ? *std::min_element(rep.theta_opt.begin(), rep.theta_opt.end()) : std::nan("");
  rep.capped_fraction = double(capped) / (points.size() * n_fiber);
  return rep;
}

}  // namespace srlab
