#include "srlab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace srlab {

namespace {

constexpr std::uint64_t kStreamHardy = 21;
constexpr std::uint64_t kStreamHardyBoundary = 22;
constexpr std::uint64_t kStreamLambda = 23;
constexpr std::uint64_t kStreamIsoBoundary = 24;
constexpr std::uint64_t kStreamIsoPoints = 25;
constexpr std::uint64_t kStreamIsoVolume = 26;
constexpr double kRatioFloor = 1e-6;

double t_max_for(const Domain& d, double t) { return t > 0.0 ? t : default_t_max(d); }

FrameCovector reduced(const Model& m, const Vec& q, const Vec& u) { return FrameCovector{q, u, Vec::Zero(m.r())}; }

double inv_pow(double len, double p) { return std::isfinite(len) && len > 0.0 ? std::pow(len, -p) : 0.0; }

// quotient of two independent estimates
Estimate quotient(const Estimate& a, const Estimate& b) {
  Estimate r;
  r.value = a.value / b.value;
  const double ra = a.value != 0.0 ? a.std_error / a.value : 0.0;
  const double rb = b.value != 0.0 ? b.std_error / b.value : 0.0;
  r.std_error = std::abs(r.value) * std::hypot(ra, rb);
  return r;
}

void finish(InequalityReport& rep) {
  if (!rep.available) return;
  if (rep.rhs.value <= 0.0) {
    rep.ratio = {kInf, 0.0};
    rep.pass = rep.lhs.value >= 0.0;
    return;
  }
  rep.pass = rep.ratio.value >= 1.0 - 3.0 * rep.ratio.std_error - kRatioFloor;
}

double distance_proxy(const Domain& domain, const Vec& q) {
  const double t = tangential_gradient_norm(domain.model(), q, domain.level_gradient(q));
  return t > 0.0 ? domain.level(q) / t : kInf;
}

double volume_of(const Domain& domain, const char* who) {
  auto v = domain.volume();
  if (!v) throw PreconditionError(std::string(who) + ": domain " + domain.id() + " has no deterministic volume");
  return *v;
}

}  // namespace

double pi_p(double p) {
  if (!(p > 1.0)) throw PreconditionError("pi_p: p must exceed 1");
  return 2.0 * kPi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(kPi / p));
}

double hardy_constant(double p, int k) {
  if (!(p > 1.0) || k < 1) throw PreconditionError("hardy_constant: need p > 1 and k >= 1");
  return std::exp(std::lgamma(0.5 * (k + p)) - std::lgamma(0.5 * (1.0 + p))) /
         (2.0 * std::pow(kPi, 0.5 * (k - 1)));
}

double hardy_constant_alt(double p, int k) {
  if (!(p > 1.0) || k < 1) throw PreconditionError("hardy_constant_alt: need p > 1 and k >= 1");
  return k / sphere_area(k - 1) * std::sqrt(kPi) *
         std::exp(std::lgamma(0.5 * (k + p)) - std::lgamma(0.5 * (1.0 + p)) - std::lgamma(0.5 * k + 1.0)) / 2.0;
}

double isoperimetric_constant(int k) { return 2.0 * kPi * sphere_area(k - 1) / sphere_area(k); }

RadiiEntry radii(const Domain& domain, const Vec& q, double p, const FiberScheme& scheme, const FlowOptions& flow,
                 double t_max) {
  const Model& model = domain.model();
  const double tm = t_max_for(domain, t_max);
  RadiiEntry e;
  e.p = p;
  const double U = domain.level(q);
  if (U < -1e-10) throw DomainError("radii: point outside the domain");
  e.on_boundary = U <= 1e-10 * domain.length_scale();
  std::mutex mu;
  std::map<std::vector<double>, ExitData> cache;
  auto chords = [&](const FrameCovector& lam) {
    std::vector<double> key(lam.u.data(), lam.u.data() + lam.u.size());
    {
      std::lock_guard<std::mutex> g(mu);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    ExitData d = chord_data(domain, lam, tm, flow);
    std::lock_guard<std::mutex> g(mu);
    cache.emplace(std::move(key), d);
    return d;
  };
  e.inv_R_p = fiber_quadrature(
      model, q, [&](const FrameCovector& lam) { return inv_pow(chords(lam).L, p); }, scheme);
  if (e.on_boundary) {
    e.inv_r_p = {kInf, 0.0};
  } else {
    e.inv_r_p = fiber_quadrature(
        model, q, [&](const FrameCovector& lam) { return inv_pow(chords(lam).l_fwd, p); }, scheme);
  }
  return e;
}

std::array<InequalityReport, 2> hardy_check(const Domain& domain, const TestFunction& f, double p,
                                            const HardyOptions& opts) {
  const Model& model = domain.model();
  const int k = model.k();
  const double vol = volume_of(domain, "hardy_check");
  if (opts.n == 0) throw PreconditionError("hardy_check: n must be positive");
  {
    Rng rng = chunk_engine(opts.seed, kStreamHardyBoundary, 0);
    for (std::size_t i = 0; i < opts.boundary_checks; ++i) {
      const BoundaryPoint b = domain.sample_boundary(rng);
      if (std::abs(f.value(b.q)) > opts.boundary_tol)
        throw PreconditionError("hardy_check: test function " + f.id + " does not vanish on the boundary");
    }
  }
  const double tm = t_max_for(domain, opts.t_max);
  const double collar = opts.collar * domain.length_scale();
  const double fiber = sphere_area(k - 1);
  struct Row {
    double grad = 0.0, viaR = 0.0, viar = 0.0, ephi = 1.0;
  };
  auto rows = map_samples<Row>(opts.n, opts.seed, kStreamHardy, opts.exec, [&](Rng& rng, std::size_t) {
    Row r;
    const Vec q = domain.sample_interior(rng);
    const Vec u = uniform_on_sphere(rng, k);
    r.ephi = opts.phi ? std::exp(opts.phi(q)) : 1.0;
    if (distance_proxy(domain, q) < collar) return r;
    const double w = vol * r.ephi;
    r.grad = w * std::pow(horizontal_gradient_sq(model, f, q), 0.5 * p);
    const double fp = std::pow(std::abs(f.value(q)), p);
    if (fp == 0.0) return r;
    const ExitData c = chord_data(domain, reduced(model, q, u), tm, opts.flow);
    r.viaR = w * fiber * fp * inv_pow(c.capped_fwd || c.capped_bwd ? kInf : c.L, p);
    r.viar = w * fiber * fp * inv_pow(c.capped_fwd ? kInf : c.l_fwd, p);
    return r;
  });
  double emin = kInf, emax = 0.0;
  std::vector<double> a(rows.size()), b1(rows.size()), b2(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a[i] = rows[i].grad;
    b1[i] = rows[i].viaR;
    b2[i] = rows[i].viar;
    emin = std::min(emin, rows[i].ephi);
    emax = std::max(emax, rows[i].ephi);
  }
  const double alpha = opts.phi ? emin / emax : 1.0;
  const double C = hardy_constant(p, k);
  const double pp = pi_p(p);
  const double c1 = alpha * std::pow(pp, p) * C;
  const double c2 = alpha * std::pow((p - 1.0) / p, p) * C;

  std::array<InequalityReport, 2> out;
  const Estimate lhs = mean_estimate(a);
  const double cs[2] = {c1, c2};
  const std::vector<double>* bs[2] = {&b1, &b2};
  for (int j = 0; j < 2; ++j) {
    auto& rep = out[j];
    rep.name = j == 0 ? "hardy_R" : "hardy_r";
    rep.test_function = f.id;
    rep.k = k;
    rep.p = p;
    rep.pi_p = pp;
    rep.C_pk = C;
    rep.alpha = alpha;
    rep.lhs = lhs;
    Estimate m = mean_estimate(*bs[j]);
    rep.rhs = {cs[j] * m.value, cs[j] * m.std_error};
    std::vector<double> scaled(*bs[j]);
    for (double& x : scaled) x *= cs[j];
    if (rep.rhs.value > 0.0) rep.ratio = ratio_estimate(a, scaled);
    rep.note = "collar " + std::to_string(opts.collar) + " x length scale excluded";
    finish(rep);
  }
  return out;
}

Lambda1Bound lambda1_lower_bound(const Domain& domain, std::size_t n, std::uint64_t seed, const FlowOptions& flow,
                                 double t_max, Execution exec) {
  const Model& model = domain.model();
  const int k = model.k();
  if (n == 0) throw PreconditionError("lambda1_lower_bound: n must be positive");
  const double tm = t_max_for(domain, t_max);
  auto Ls = map_samples<double>(n, seed, kStreamLambda, exec, [&](Rng& rng, std::size_t) {
    const Vec q = domain.sample_interior(rng);
    const ExitData c = chord_data(domain, reduced(model, q, uniform_on_sphere(rng, k)), tm, flow);
    return c.capped_fwd || c.capped_bwd ? kInf : c.L;
  });
  Lambda1Bound b;
  b.samples = n;
  for (double L : Ls) {
    if (!std::isfinite(L))
      ++b.capped;
    else
      b.L_sup = std::max(b.L_sup, L);
  }
  b.value = b.capped > 0 || b.L_sup <= 0.0 ? 0.0 : k * kPi * kPi / (b.L_sup * b.L_sup);
  if (b.capped > 0) b.L_sup = kInf;
  if (domain.known.L) {
    b.analytic_L = domain.known.L;
    b.analytic_value = k * kPi * kPi / (*domain.known.L * *domain.known.L);
  }
  return b;
}

IsoperimetricResult isoperimetric_check(const Domain& domain, const IsoperimetricOptions& opts) {
  const Model& model = domain.model();
  const int k = model.k();
  const double vol = volume_of(domain, "isoperimetric_check");
  if (opts.n_boundary == 0 || opts.n_points == 0 || opts.n_fiber == 0)
    throw PreconditionError("isoperimetric_check: sample counts must be positive");
  const double tm = t_max_for(domain, opts.t_max);
  IsoperimetricResult res;

  struct Row {
    double sigma = 0.0, l = 0.0, lt = 0.0, ephi = 1.0;
    bool capped = false;
  };
  auto rows = map_samples<Row>(opts.n_boundary, opts.seed, kStreamIsoBoundary, opts.exec, [&](Rng& rng, std::size_t) {
    Row r;
    const BoundaryPoint b = domain.sample_boundary(rng);
    r.ephi = opts.phi ? std::exp(opts.phi(b.q)) : 1.0;
    r.sigma = b.area_weight * sigma_factor(domain, b.q) * r.ephi;
    const HorizontalNormal nh = horizontal_normal(domain, b.q);
    if (nh.characteristic) return r;
    const FrameCovector lam = reduced(model, b.q, sample_inward_direction(rng, nh.frame));
    const ExitLength e = exit_length(domain, lam, tm, opts.flow);
    r.capped = e.capped;
    r.l = e.capped ? kInf : e.length;
    r.lt = model.has_cut_hook() ? std::min(r.l, model.cut_length(lam)) : r.l;
    return r;
  });
  std::vector<double> sig(rows.size());
  bool capped = false;
  double emin = kInf, emax = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sig[i] = rows[i].sigma;
    capped = capped || rows[i].capped;
    if (!rows[i].capped) {
      res.l_sup_empirical = std::max(res.l_sup_empirical, rows[i].l);
      res.diam_r_empirical = std::max(res.diam_r_empirical, rows[i].lt);
    }
    emin = std::min(emin, rows[i].ephi);
    emax = std::max(emax, rows[i].ephi);
  }
  if (capped) res.l_sup_empirical = kInf;

  if (opts.phi) {
    res.sigma = mean_estimate(sig);
    auto ev = map_samples<double>(opts.n_boundary, opts.seed, kStreamIsoVolume, opts.exec, [&](Rng& rng, std::size_t) {
      return vol * std::exp(opts.phi(domain.sample_interior(rng)));
    });
    res.omega = mean_estimate(ev);
    for (double x : ev) {
      emin = std::min(emin, x / vol);
      emax = std::max(emax, x / vol);
    }
  } else {
    auto s = domain.boundary_measure();
    res.sigma = s ? Estimate{*s, 0.0} : mean_estimate(sig);
    res.omega = {vol, 0.0};
  }
  const double alpha = opts.phi ? emin / emax : 1.0;

  std::vector<Vec> pts;
  {
    Rng rng = chunk_engine(opts.seed, kStreamIsoPoints, 0);
    for (std::size_t i = 0; i < opts.n_points; ++i) pts.push_back(domain.sample_interior(rng));
  }
  res.visibility = visibility_angles(domain, pts, opts.n_fiber, opts.seed, opts.flow, tm, opts.exec);
  res.l_analytic = domain.known.L;
  res.diam_r_analytic = domain.known.diam_r;

  const double C = isoperimetric_constant(k);
  const Estimate lhs = quotient(res.sigma, res.omega);
  const double thetas[2] = {res.visibility.theta_inf,
                            model.has_cut_hook() ? res.visibility.theta_opt_inf : std::nan("")};
  const double lens[2] = {res.l_sup_empirical, res.diam_r_empirical};
  for (int j = 0; j < 2; ++j) {
    auto& rep = res.reports[j];
    rep.name = j == 0 ? "isoperimetric_l" : "isoperimetric_diam";
    rep.k = k;
    rep.C = C;
    rep.alpha = alpha;
    rep.lhs = lhs;
    if (j == 1 && !model.has_cut_hook()) {
      rep.available = false;
      rep.note = "no cut hook: optimal visibility and reduced diameter unavailable";
      continue;
    }
    const double L = lens[j];
    if (!std::isfinite(L)) {
      rep.rhs = {0.0, 0.0};
      rep.note = "capped trajectory: length taken infinite";
    } else {
      const double th = thetas[j];
      rep.rhs = {alpha * C * th / L, alpha * C * res.visibility.theta_inf_stderr / L};
      rep.ratio = quotient(rep.lhs, rep.rhs);
      rep.note = "sampled supremum (" + std::to_string(opts.n_boundary) + " boundary covectors)";
    }
    finish(rep);
  }
  return res;
}

}  // namespace srlab
