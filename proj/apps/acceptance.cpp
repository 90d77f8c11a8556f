// Acceptance suite: one PASS/FAIL line per criterion, runtimes measured on the host.
#include "srlab/carnot.hpp"
#include "srlab/functions.hpp"
#include "srlab/inequalities.hpp"
#include "srlab/reduction.hpp"
#include "srlab/santalo.hpp"
#include "srlab/spectral.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace srlab;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<void(Outcome&)> run;
};

FrameCovector reduced(const Model& m, const Vec& q, const Vec& u) { return FrameCovector{q, u, Vec::Zero(m.r())}; }

CarnotSpec random_spec(Rng& rng, int k, int m2) {
  CarnotSpec s;
  s.k = k;
  s.m2 = m2;
  s.c.assign(k * k * m2, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      for (int l = 0; l < m2; ++l) {
        const double v = 2.0 * uniform01(rng) - 1.0;
        s.at(i, j, l) = v;
        s.at(j, i, l) = -v;
      }
  return s;
}

// 1
void fiber_identities(Outcome& o) {
  Rng rng(101);
  FiberScheme det;
  det.kind = FiberScheme::Kind::Deterministic;
  for (int k = 2; k <= 4; ++k) {
    const auto t0 = Clock::now();
    Mat A = Mat::Random(k, k);
    Mat Q = A + A.transpose();
    Vec n = uniform_on_sphere(rng, k);
    const double e1 = std::abs(fiber_quadrature(k, [](const Vec&) { return 1.0; }, det).value - sphere_area(k - 1));
    const double e2 = std::abs(fiber_quadrature(k, [&](const Vec& u) { return u.dot(Q * u); }, det).value -
                               sphere_area(k - 1) * Q.trace() / k);
    const double e3 =
        std::abs(fiber_quadrature(k, [&](const Vec& u) { return std::max(0.0, u.dot(n)); }, det, &n).value -
                 sphere_area(k) / (2.0 * kPi));
    const double secs = since(t0);
    const double worst = std::max({e1, e2, e3});
    o.detail << " k=" << k << ": err " << worst << " (" << secs << " s);";
    o.require(worst < 1e-8, "k=" + std::to_string(k) + " error < 1e-8");
    o.require(secs < 1.0, "k=" + std::to_string(k) + " runtime < 1 s");
  }
}

// 2
void certificates(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(202);
  std::vector<std::shared_ptr<const Model>> models{make_heisenberg(1), std::make_shared<MartinetModel>(), make_chf(1),
                                                   make_qhf(1)};
  CarnotSpec spec = random_spec(rng, 3, 2);
  o.require(is_bracket_generating(spec), "random spec is bracket generating");
  models.push_back(std::make_shared<CarnotModel>("carnot-step2", spec));
  for (const auto& m : models) {
    ReductionCertificate c = certify_reduction(m, 200, 7, 1e-9);
    const double worst = std::max({c.h1_residual, c.h1_dynamic, c.h2_residual});
    o.detail << " " << m->id() << ": " << worst << ";";
    o.require(c.h1_pass && c.h2_pass && worst < 1e-9, m->id() + " H1/H2");
  }
  const double secs = since(t0);
  o.detail << " total " << secs << " s";
  o.require(secs < 10.0, "runtime < 10 s");
}

// 3
void great_circles(Outcome& o) {
  const auto t0 = Clock::now();
  Rng rng(303);
  double gap = 0.0;
  for (auto m : {make_chf(1), make_chf(2), make_qhf(1)}) {
    for (int s = 0; s < 5; ++s) {
      Vec q = uniform_on_sphere(rng, m->chart_dim());
      Vec u = uniform_on_sphere(rng, m->k());
      Vec w = m->horizontal_frame(q) * u;
      GeodesicTrace tr = integrate_geodesic(*m, reduced(*m, q, u), 2.0 * kPi);
      for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double t = tr.times[i];
        gap = std::max(gap, (tr.states[i].q - (std::cos(t) * q + std::sin(t) * w)).norm());
      }
    }
  }
  auto h = make_heisenberg(1);
  double hgap = 0.0;
  for (int s = 0; s < 5; ++s) {
    Vec q = standard_normal(rng, 3), u = uniform_on_sphere(rng, 2);
    GeodesicTrace tr = integrate_geodesic(*h, reduced(*h, q, u), 2.0 * kPi);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      Vec step = Vec::Zero(3);
      step.head(2) = tr.times[i] * u;
      hgap = std::max(hgap, (tr.states[i].q - group_multiply(h->spec(), q, step)).norm());
    }
  }
  const double secs = since(t0);
  o.detail << " hopf gap " << gap << ", heisenberg gap " << hgap << ", " << secs << " s";
  o.require(gap < 1e-7, "great circles to 1e-7");
  o.require(hgap < 1e-8, "heisenberg lines to 1e-8");
  o.require(secs < 10.0, "runtime < 10 s");
}

// 4
void santalo(Outcome& o) {
  const auto t0 = Clock::now();
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  SantaloOptions so;
  so.n = 100000;
  so.seed = 404;
  auto r = santalo_balance(dom, {constant_function(1.0), horizontal_derivative_sq(chf, cos_delta())}, so);
  const double target = 2.0 * kPi * kPi * kPi;
  const double se = std::hypot(r[0].lhs.std_error, r[0].rhs.std_error);
  o.detail << " F=1: lhs " << r[0].lhs.value << " rhs " << r[0].rhs.value << " +- " << r[0].rhs.std_error
           << " (target " << target << ");";
  o.require(std::abs(r[0].lhs.value - target) <= 3.0 * se, "lhs within 3 combined stderr of 2 pi^3");
  o.require(std::abs(r[0].rhs.value - target) <= 3.0 * se, "rhs within 3 combined stderr of 2 pi^3");
  const double rel = std::max(r[0].lhs.std_error / r[0].lhs.value, r[0].rhs.std_error / r[0].rhs.value);
  o.require(rel < 5e-3, "relative stderr < 0.5%");
  o.detail << " grad: lhs " << r[1].lhs.value << " rhs " << r[1].rhs.value << " (" << r[1].discrepancy << " se);";
  o.require(r[1].balanced, "squared derivative of cos delta balances");
  const double secs = since(t0);
  o.detail << " " << secs << " s";
  o.require(secs < 120.0, "runtime < 2 min");
}

// 5
void eigenvalue_chain(Outcome& o) {
  struct Case {
    std::shared_ptr<SphereModel> model;
    SpectralCase sc;
    int d;
    double expect;
  };
  std::vector<Case> cases{{make_round_sphere(2), SpectralCase::Sphere, 2, 2.0},
                          {make_chf(1), SpectralCase::Chf, 1, 2.0},
                          {make_qhf(1), SpectralCase::Qhf, 1, 4.0}};
  double spectral_secs = 0.0;
  for (const auto& c : cases) {
    HemisphereDomain dom(c.model);
    Lambda1Bound b = lambda1_lower_bound(dom, 2000, 505);
    const double chain = c.model->k() * kPi * kPi / (b.L_sup * b.L_sup);
    // |L - pi| < 1e-4 moves k pi^2 / L^2 by at most 2e-4 / pi relative
    const double chain_tol = 2.0 * 1e-4 / kPi * c.expect * 1.0001;
    const auto t0 = Clock::now();
    SpectralResult s = separated_eigensolve(c.sc, c.d, 4096);
    spectral_secs += since(t0);
    const double res = cylindrical_residual(c.sc, c.d);
    o.detail << " " << c.model->id() << ": L " << b.L_sup << " bound " << chain << " lambda1 " << s.extrapolated
             << " resid " << res << ";";
    o.require(b.capped == 0 && std::abs(b.L_sup - kPi) < 1e-4, c.model->id() + " L = pi");
    o.require(std::abs(chain - c.expect) <= chain_tol, c.model->id() + " k pi^2 / L^2");
    o.require(std::abs(s.extrapolated - c.expect) < 1e-3, c.model->id() + " separated eigenvalue");
    o.require(res < 1e-10, c.model->id() + " cylindrical residual");
  }
  o.detail << " eigensolves " << spectral_secs << " s";
  o.require(spectral_secs < 30.0, "eigensolves < 30 s");
}

// 6
void band(Outcome& o) {
  const double eps = 0.1;
  auto m = std::make_shared<SphericalBandModel>(eps);
  BandChartDomain dom(m);
  Lambda1Bound b = lambda1_lower_bound(dom, 2000, 606);
  const double bound = m->k() * kPi * kPi / (b.L_sup * b.L_sup);
  const double target = kPi * kPi / 0.04;
  o.detail << " L " << std::setprecision(15) << b.L_sup << " bound " << bound << " target " << target;
  o.require(b.capped == 0 && std::abs(bound - target) < 1e-6, "pi^2 / L^2 = pi^2 / 0.04 within 1e-6");
  IntervalEigen e = band_eigenvalue(eps);
  o.detail << std::setprecision(6) << "; (solved band lambda1 " << e.extrapolated << ", below the bound)";
}

// 7
void isoperimetric(Outcome& o) {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  IsoperimetricOptions io;
  io.n_points = 100;
  io.n_fiber = 100;
  io.seed = 707;
  o.require(dom.boundary_measure().has_value(), "sigma by deterministic quadrature");
  IsoperimetricResult r = isoperimetric_check(dom, io);
  const InequalityReport& rep = r.reports[0];
  const double se = std::hypot(rep.lhs.std_error, rep.rhs.std_error);
  o.detail << " chf(1): sigma/omega " << rep.lhs.value << ", C theta/l " << rep.rhs.value << " +- "
           << rep.rhs.std_error << " (theta_inf " << r.visibility.theta_inf << ");";
  o.require(std::abs(rep.lhs.value - 1.0) <= 3.0 * se + 1e-9, "sigma/omega = 1");
  o.require(std::abs(rep.rhs.value - 1.0) <= 3.0 * se + 1e-9, "C theta / l = 1");

  auto h = make_heisenberg(1);
  HeisenbergBallDomain ball(h, 1.0);
  CarnotBounds cb = carnot_bounds(h->spec(), ball, 400, 4000, 708);
  o.detail << " heisenberg ball: sigma/omega " << cb.sigma_over_omega.value << " +- " << cb.sigma_over_omega.std_error
           << " > " << cb.perimeter_bound;
  o.require(cb.sigma_over_omega.value - 3.0 * cb.sigma_over_omega.std_error > cb.perimeter_bound,
            "strict perimeter inequality on the ball");
}

// 8
void constants(Outcome& o) {
  o.require(pi_p(2.0) == kPi, "pi_2 = pi exactly");
  double worst_chain = 0.0, worst_quad = 0.0;
  FiberScheme det;
  det.kind = FiberScheme::Kind::Deterministic;
  for (int k = 2; k <= 4; ++k) {
    worst_chain = std::max(
        worst_chain, std::abs(std::pow(pi_p(2.0), 2.0) * hardy_constant(2.0, k) - k * kPi * kPi / sphere_area(k - 1)));
    for (double p : {1.5, 2.0, 3.0}) {
      // C_{p,k}^{-1} is the fiber integral of |u_1|^p
      const double quad = fiber_quadrature(k, [p](const Vec& u) { return std::pow(std::abs(u(0)), p); }, det).value;
      worst_quad = std::max(worst_quad, std::abs(hardy_constant(p, k) - 1.0 / quad));
    }
  }
  o.detail << " pi_2 - pi = " << pi_p(2.0) - kPi << "; chain err " << worst_chain << "; C_pk quadrature err "
           << worst_quad;
  o.require(worst_chain < 1e-12, "pi_p^p C_pk at p = 2");
  o.require(worst_quad < 1e-8, "C_pk closed form vs quadrature");
}

// 9
void hardy(Outcome& o) {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  HardyOptions ho;
  ho.n = 100000;
  ho.seed = 909;
  auto reps = hardy_check(dom, cos_delta(), 2.0, ho);
  const Estimate& r = reps[0].ratio;
  o.detail << " ratio " << r.value << " +- " << r.std_error;
  o.require(std::abs(r.value - 1.0) <= 3.0 * r.std_error, "ratio within 1 +- 3 sigma");
}

// 10a..10e
void energy(Outcome& o) {
  Rng rng(1001);
  std::vector<std::shared_ptr<const Model>> models{make_chf(1), make_qhf(1), make_heisenberg(1),
                                                   std::make_shared<MartinetModel>()};
  double worst = 0.0;
  for (const auto& m : models)
    for (int s = 0; s < 4; ++s) {
      FrameCovector l{m->sample_point(rng), uniform_on_sphere(rng, m->k()), standard_normal(rng, m->r())};
      worst = std::max(worst, integrate_geodesic(*m, l, 4.0).h_drift / 4.0);
    }
  o.detail << " max |dH| per unit time " << worst;
  o.require(worst <= 1e-9, "energy drift <= 1e-9 per unit time");
}

void reversibility(Outcome& o) {
  Rng rng(1002);
  std::vector<std::shared_ptr<const Model>> models{make_chf(1), make_qhf(1), make_heisenberg(1),
                                                   std::make_shared<MartinetModel>()};
  double worst = 0.0;
  for (const auto& m : models)
    for (int s = 0; s < 4; ++s) {
      FrameCovector l{m->sample_point(rng), uniform_on_sphere(rng, m->k()), 0.5 * standard_normal(rng, m->r())};
      GeodesicTrace fwd = integrate_geodesic(*m, l, 2.0);
      FrameCovector back = negate(fwd.states.back());
      back.u.normalize();
      const FrameCovector e = integrate_geodesic(*m, back, 2.0).states.back();
      worst = std::max({worst, (e.q - l.q).norm(), (m->covector(e) + m->covector(l)).norm()});
    }
  o.detail << " max return error " << worst;
  o.require(worst < 1e-7, "reversed flow returns to 1e-7");
}

void chord_invariance(Outcome& o) {
  auto h = make_heisenberg(1);
  HeisenbergBallDomain ball(h, 1.0);
  auto c = make_chf(1);
  HemisphereDomain hemi(c);
  Rng rng(1003);
  double worst = 0.0;
  for (const Domain* dom : {static_cast<const Domain*>(&ball), static_cast<const Domain*>(&hemi)}) {
    const Model& m = dom->model();
    for (int s = 0; s < 10; ++s) {
      FrameCovector l = reduced(m, dom->sample_interior(rng), uniform_on_sphere(rng, m.k()));
      ExitData d0 = chord_data(*dom, l, default_t_max(*dom));
      FrameCovector lt = integrate_geodesic(m, l, 0.6 * d0.l_fwd).states.back();
      lt.v.setZero();
      lt.u.normalize();
      worst = std::max(worst, std::abs(chord_data(*dom, lt, default_t_max(*dom)).L - d0.L));
    }
  }
  o.detail << " max |L(phi_t) - L| " << worst;
  o.require(worst < 1e-8, "chord length invariant to 1e-8");
}

void associativity(Outcome& o) {
  Rng rng(1004);
  double worst = 0.0;
  for (auto [k, m2] : {std::pair{2, 1}, std::pair{3, 2}, std::pair{4, 3}}) {
    CarnotSpec s = random_spec(rng, k, m2);
    for (int i = 0; i < 300; ++i) {
      Vec a = standard_normal(rng, s.dim()), b = standard_normal(rng, s.dim()), c = standard_normal(rng, s.dim());
      worst = std::max(worst, (group_multiply(s, group_multiply(s, a, b), c) -
                               group_multiply(s, a, group_multiply(s, b, c)))
                                  .norm());
      worst = std::max(worst, group_multiply(s, a, group_inverse(s, a)).norm());
    }
  }
  o.detail << " max defect " << worst;
  o.require(worst < 1e-12, "associativity and inverses to 1e-12");
}

void characteristic(Outcome& o) {
  auto h = make_heisenberg(1);
  Vec lo(3), hi(3);
  lo << -1, -1, -1;
  hi << 1, 1, 1;
  BoxDomain box(h, lo, hi);
  std::vector<double> f;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    f.push_back(characteristic_scan(box, 200000, eps, 1005).fraction);
    o.detail << " eps " << eps << ": " << f.back() << ";";
  }
  o.require(f[0] > 0.0, "coarse scan sees characteristic points");
  o.require(f[1] < f[0] / 5.0 && f[2] < f[1] / 5.0, "fraction shrinks with eps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srlab acceptance suite"};
  std::vector<std::string> only;
  app.add_option("--criterion", only, "run only these ids (1..10, 10a..10e)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> props{{"10a", "energy conservation", energy},
                                     {"10b", "flow reversibility", reversibility},
                                     {"10c", "chord length flow invariance", chord_invariance},
                                     {"10d", "group associativity", associativity},
                                     {"10e", "characteristic fraction -> 0", characteristic}};
  const std::vector<Criterion> all{{"1", "fiber measure identities", fiber_identities},
                                   {"2", "H1/H2 certificates", certificates},
                                   {"3", "reduced geodesics vs closed forms", great_circles},
                                   {"4", "Santalo balance on the chf(1) hemisphere", santalo},
                                   {"5", "eigenvalue chain on hemispheres", eigenvalue_chain},
                                   {"6", "spherical band reduced bound", band},
                                   {"7", "isoperimetric equality and strict case", isoperimetric},
                                   {"8", "constant consistency", constants},
                                   {"9", "Hardy equality case", hardy}};

  auto selected = [&](const std::string& id) {
    if (only.empty()) return true;
    for (const auto& s : only)
      if (s == id || (s == "10" && id.rfind("10", 0) == 0 && id.size() == 3)) return true;
    return false;
  };

  std::cout << std::setprecision(10);
  bool ok = true;
  auto report = [&](const Criterion& c) {
    Outcome o;
    o.detail << std::setprecision(10);
    const auto t0 = Clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << " (" << std::setprecision(3) << since(t0)
              << " s):" << std::setprecision(10) << o.detail.str() << std::endl;
    return o.pass;
  };
  for (const auto& c : all)
    if (selected(c.id)) ok = report(c) && ok;

  bool props_ok = true;
  std::size_t ran = 0;
  for (const auto& c : props)
    if (selected(c.id)) {
      ++ran;
      props_ok = report(c) && props_ok;
    }
  if (ran == props.size()) std::cout << (props_ok ? "PASS " : "FAIL ") << "10 property suites" << std::endl;
  ok = ok && props_ok;
  return ok ? 0 : 1;
}
