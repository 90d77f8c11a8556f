#include <doctest.h>

#include "srlab/flow.hpp"
#include "srlab/sampling.hpp"

#include <cmath>
#include <sstream>

using namespace srlab;

namespace {

FrameCovector reduced(const Model& m, const Vec& q, const Vec& u) { return FrameCovector{q, u, Vec::Zero(m.r())}; }

Vec unit2(double a) {
  Vec u(2);
  u << std::cos(a), std::sin(a);
  return u;
}

// max distance between a trace and an ambient great circle through q with velocity w
double great_circle_gap(const GeodesicTrace& tr, const Vec& q, const Vec& w) {
  double gap = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double t = tr.times[i];
    gap = std::max(gap, (tr.states[i].q - (std::cos(t) * q + std::sin(t) * w)).norm());
  }
  return gap;
}

}  // namespace

TEST_CASE("heisenberg reduced geodesics are left-translated lines") {
  auto h = make_heisenberg(1);
  Vec q0 = Vec::Zero(3);
  GeodesicTrace tr = integrate_geodesic(*h, reduced(*h, q0, unit2(0.0)), 1.0);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  CHECK((tr.states.back().q - Vec::Unit(3, 0)).norm() < 1e-10);

  Vec q1(3);
  q1 << 0.0, 1.0, 0.0;
  GeodesicTrace t2 = integrate_geodesic(*h, reduced(*h, q1, unit2(0.0)), 2.0);
  for (std::size_t i = 0; i < t2.times.size(); ++i) {
    const double t = t2.times[i];
    Vec expect(3);
    expect << t, 1.0, -t / 2;
    CHECK((t2.states[i].q - expect).norm() < 1e-8);
  }
}

TEST_CASE("reduced geodesics on Hopf spheres are great circles") {
  Rng rng(3);
  for (auto m : {make_chf(1), make_chf(2), make_qhf(1), make_round_sphere(2)}) {
    CAPTURE(m->id());
    for (int s = 0; s < 5; ++s) {
      Vec q = uniform_on_sphere(rng, m->chart_dim());
      Vec u = uniform_on_sphere(rng, m->k());
      FrameCovector l = reduced(*m, q, u);
      Vec w = m->horizontal_frame(q) * u;
      GeodesicTrace tr = integrate_geodesic(*m, l, 2.0 * kPi);
      CHECK(great_circle_gap(tr, q, w) < 1e-7);
      CHECK(tr.h_drift < 1e-10 * 2.0 * kPi);
      CHECK(tr.v_drift < 1e-9 * 2.0 * kPi);
      for (const auto& st : tr.states) CHECK(std::abs(st.q.norm() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("energy is conserved for general covectors") {
  Rng rng(5);
  std::vector<std::shared_ptr<const Model>> models = {make_chf(1), make_qhf(1), make_heisenberg(1),
                                                      std::make_shared<MartinetModel>()};
  for (const auto& m : models) {
    CAPTURE(m->id());
    Vec q = m->sample_point(rng);
    FrameCovector l{q, uniform_on_sphere(rng, m->k()), standard_normal(rng, m->r())};
    FlowOptions o;
    GeodesicTrace tr = integrate_geodesic(*m, l, 4.0, o);
    CHECK(tr.h_drift <= 1e-9 * 4.0);
  }
}

TEST_CASE("frame-coordinate route agrees with the canonical route") {
  Rng rng(7);
  std::vector<std::shared_ptr<const Model>> models = {make_chf(1), make_heisenberg(1), make_heisenberg(2),
                                                      std::make_shared<MartinetModel>(),
                                                      std::make_shared<SphericalBandModel>(0.3)};
  for (const auto& m : models) {
    CAPTURE(m->id());
    for (int s = 0; s < 3; ++s) {
      Vec q = m->sample_point(rng);
      if (m->id().rfind("spherical-band", 0) == 0) q(0) = 1.3;
      FrameCovector l{q, uniform_on_sphere(rng, m->k()), 0.8 * standard_normal(rng, m->r())};
      const double T = m->id().rfind("spherical-band", 0) == 0 ? 0.2 : 1.5;
      GeodesicTrace a = integrate_frame_route(*m, l, T);
      GeodesicTrace b = integrate_geodesic(*m, l, T);
      const FrameCovector& ea = a.states.back();
      const FrameCovector& eb = b.states.back();
      CHECK(a.times.back() == doctest::Approx(T));
      CHECK((ea.q - eb.q).norm() < 1e-7);
      CHECK((ea.u - eb.u).norm() < 1e-7);
      CHECK((ea.v - eb.v).norm() < 1e-7);
    }
  }
}

TEST_CASE("flow reversibility") {
  Rng rng(9);
  std::vector<std::shared_ptr<const Model>> models = {make_chf(1), make_qhf(1), make_heisenberg(1),
                                                      std::make_shared<MartinetModel>()};
  for (const auto& m : models) {
    CAPTURE(m->id());
    Vec q = m->sample_point(rng);
    FrameCovector l{q, uniform_on_sphere(rng, m->k()), 0.5 * standard_normal(rng, m->r())};
    GeodesicTrace fwd = integrate_geodesic(*m, l, 2.0);
    FrameCovector back = negate(fwd.states.back());
    back.u.normalize();  // removes the O(1e-11) energy drift
    GeodesicTrace bwd = integrate_geodesic(*m, back, 2.0);
    const FrameCovector& e = bwd.states.back();
    CHECK((e.q - l.q).norm() < 1e-7);
    // compare chart covectors: local horizontal frames may differ between the two ends
    Vec pe = m->covector(e), pl = m->covector(l);
    CHECK((pe + pl).norm() < 1e-7);
    CHECK((e.v + l.v).norm() < 1e-7);
  }
}

TEST_CASE("exit lengths") {
  auto c = make_chf(1);
  HemisphereDomain hemi(c);
  Vec q(4);
  q << 0.0, 0.0, 0.6, 0.8;
  HorizontalNormal n = horizontal_normal(hemi, q);
  for (double a : {0.0, 0.5, 1.2, -1.4}) {
    // rotate the inward normal within the horizontal plane
    Vec u(2);
    u << std::cos(a) * n.frame(0) - std::sin(a) * n.frame(1), std::sin(a) * n.frame(0) + std::cos(a) * n.frame(1);
    ExitLength e = exit_length(hemi, reduced(*c, q, u), default_t_max(hemi));
    CHECK_FALSE(e.capped);
    CHECK(e.length == doctest::Approx(kPi).epsilon(1e-7));
  }
  auto r2 = make_round_sphere(2);
  HemisphereDomain rh(r2);
  Vec e(3);
  e << 0.0, 1.0, 0.0;
  Vec u = r2->horizontal_frame(e).transpose() * Vec::Unit(3, 0);
  CHECK(exit_length(rh, reduced(*r2, e, u), default_t_max(rh)).length == doctest::Approx(kPi).epsilon(1e-7));

  auto band = std::make_shared<SphericalBandModel>(0.1);
  BandChartDomain bd(band);
  Vec b(2);
  b << kPi / 2 - 0.1, 0.4;
  Vec one = Vec::Ones(1);
  ExitLength eb = exit_length(bd, reduced(*band, b, one), default_t_max(bd));
  CHECK(eb.length == doctest::Approx(0.2).epsilon(1e-9));
  // outward from the boundary: no time inside
  CHECK(exit_length(bd, reduced(*band, b, -one), default_t_max(bd)).length < 1e-9);

  Vec out(4);
  out << -0.5, 0.0, 0.0, std::sqrt(0.75);
  CHECK_THROWS_AS(exit_length(hemi, reduced(*c, out, Vec::Unit(2, 0)), 10.0), PreconditionError);
}

TEST_CASE("chord data") {
  auto c = make_chf(1);
  HemisphereDomain hemi(c);
  Rng rng(11);
  for (int s = 0; s < 20; ++s) {
    Vec q = hemi.sample_interior(rng);
    FrameCovector l = reduced(*c, q, uniform_on_sphere(rng, 2));
    ExitData d = chord_data(hemi, l, default_t_max(hemi));
    CHECK(d.L == doctest::Approx(kPi).epsilon(1e-7));
    CHECK(d.cut_known);
    CHECK(d.l_tilde <= d.l_fwd);
    CHECK(d.l_tilde <= kPi);
  }
  auto h = make_heisenberg(1);
  HeisenbergBallDomain ball(h, 1.0);
  for (int s = 0; s < 20; ++s) {
    Vec q = ball.sample_interior(rng);
    ExitData d = chord_data(ball, reduced(*h, q, uniform_on_sphere(rng, 2)), default_t_max(ball));
    CHECK_FALSE(d.capped_fwd);
    CHECK(d.L <= 2.0 + 1e-9);
  }
  // on the boundary, pointing inward: the backward length vanishes
  BoundaryPoint bp = ball.sample_boundary(rng);
  HorizontalNormal n = horizontal_normal(ball, bp.q);
  ExitData d = chord_data(ball, reduced(*h, bp.q, n.frame), default_t_max(ball));
  CHECK(d.l_bwd < 1e-9);
  CHECK(d.L == doctest::Approx(d.l_fwd));
}

TEST_CASE("chord length is invariant along the flow") {
  auto h = make_heisenberg(1);
  HeisenbergBallDomain ball(h, 1.0);
  auto c = make_chf(1);
  HemisphereDomain hemi(c);
  Rng rng(13);
  for (const Domain* dom : {static_cast<const Domain*>(&ball), static_cast<const Domain*>(&hemi)}) {
    const Model& m = dom->model();
    for (int s = 0; s < 10; ++s) {
      Vec q = dom->sample_interior(rng);
      FrameCovector l = reduced(m, q, uniform_on_sphere(rng, 2));
      ExitData d0 = chord_data(*dom, l, default_t_max(*dom));
      const double t = 0.6 * d0.l_fwd;
      GeodesicTrace tr = integrate_geodesic(m, l, t);
      FrameCovector lt = tr.states.back();
      lt.v.setZero();
      lt.u.normalize();
      ExitData d1 = chord_data(*dom, lt, default_t_max(*dom));
      CHECK(std::abs(d1.L - d0.L) < 1e-8);
    }
  }
}

TEST_CASE("path integrals") {
  auto c = make_chf(1);
  HemisphereDomain hemi(c);
  Rng rng(17);
  Vec q = hemi.sample_interior(rng);
  FrameCovector l = reduced(*c, q, uniform_on_sphere(rng, 2));
  PathIntegral one = integrate_along(hemi, l, [](const Vec&, const Vec&) { return 1.0; }, default_t_max(hemi));
  ExitLength e = exit_length(hemi, l, default_t_max(hemi));
  CHECK(one.integral == doctest::Approx(e.length).epsilon(1e-12));
  // int x0 along a great circle: closed form from q cos t + w sin t
  Vec w = c->horizontal_frame(q) * l.u;
  PathIntegral px = integrate_along(hemi, l, [](const Vec& x, const Vec&) { return x(0); }, default_t_max(hemi));
  const double T = e.length;
  CHECK(px.integral == doctest::Approx(q(0) * std::sin(T) + w(0) * (1.0 - std::cos(T))).epsilon(1e-9));
}

TEST_CASE("integration errors") {
  auto band = std::make_shared<SphericalBandModel>(0.1);
  Vec b(2);
  b << kPi / 2, 0.0;
  CHECK_THROWS_AS(integrate_geodesic(*band, reduced(*band, b, Vec::Ones(1)), 3.0), NumericError);
  Vec u(1);
  u << 0.5;
  CHECK_THROWS_AS(integrate_geodesic(*band, reduced(*band, b, u), 1.0), PreconditionError);
}

TEST_CASE("trace export") {
  auto h = make_heisenberg(1);
  GeodesicTrace tr = integrate_geodesic(*h, reduced(*h, Vec::Zero(3), unit2(0.3)), 1.0);
  std::ostringstream os;
  write_trace_csv(os, tr);
  std::string header = os.str().substr(0, os.str().find('\n'));
  CHECK(header == "t,q_1,q_2,q_3,u_1,u_2,v_1,H");
}
