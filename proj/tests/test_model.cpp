#include <doctest.h>

#include "srlab/domain.hpp"
#include "srlab/model.hpp"
#include "srlab/sampling.hpp"

#include <cmath>

using namespace srlab;

namespace {

std::vector<std::shared_ptr<const Model>> all_models() {
  CarnotSpec s;
  s.k = 3;
  s.m2 = 2;
  s.c.assign(18, 0.0);
  s.at(0, 1, 0) = 1.0;
  s.at(1, 0, 0) = -1.0;
  s.at(1, 2, 1) = 0.7;
  s.at(2, 1, 1) = -0.7;
  s.at(0, 2, 1) = -0.4;
  s.at(2, 0, 1) = 0.4;
  return {make_round_sphere(2), make_round_sphere(3), make_chf(1),  make_chf(2),
          make_qhf(1),          make_heisenberg(1),   make_heisenberg(2),
          std::make_shared<CarnotModel>("carnot-step2", s), std::make_shared<MartinetModel>(),
          std::make_shared<SphericalBandModel>(0.1)};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("quaternion left multiplication matrices") {
  Mat I = quaternion_left(1), J = quaternion_left(2), K = quaternion_left(3);
  Mat id = Mat::Identity(4, 4);
  CHECK((I * I + id).norm() == doctest::Approx(0.0));
  CHECK((J * J + id).norm() == doctest::Approx(0.0));
  CHECK((I * J - K).norm() == doctest::Approx(0.0));
  CHECK((J * K - I).norm() == doctest::Approx(0.0));
  CHECK((K * I - J).norm() == doctest::Approx(0.0));
}

TEST_CASE("hamiltonian examples") {
  auto h = make_heisenberg(1);
  FrameCovector l{Vec::Zero(3), Vec::Zero(2), Vec::Zero(1)};
  l.u(0) = 1.0;
  CHECK(hamiltonian(*h, l) == doctest::Approx(0.5));
  l.u.setZero();
  l.v(0) = 3.0;
  CHECK(hamiltonian(*h, l) == 0.0);

  auto c = make_chf(1);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    Vec q = uniform_on_sphere(rng, 4);
    FrameCovector lam{q, uniform_on_sphere(rng, 2), standard_normal(rng, 1) * 4.0};
    CHECK(hamiltonian(*c, lam) == doctest::Approx(0.5).epsilon(1e-14));
    // isotropy under rotation of u
    const double a = 0.3 * i;
    Vec u2(2);
    u2 << std::cos(a) * lam.u(0) - std::sin(a) * lam.u(1), std::sin(a) * lam.u(0) + std::cos(a) * lam.u(1);
    CHECK(hamiltonian(*c, FrameCovector{q, u2, lam.v}) == doctest::Approx(0.5).epsilon(1e-14));
  }
  Vec off = Vec::Zero(4);
  off(0) = 2.0;
  CHECK_THROWS_AS(hamiltonian(*c, FrameCovector{off, Vec::Zero(2), Vec::Zero(1)}), DomainError);
}

TEST_CASE("frames span the tangent space; sphere frames are orthonormal") {
  Rng rng(7);
  for (const auto& m : all_models()) {
    CAPTURE(m->id());
    for (int s = 0; s < 20; ++s) {
      Vec q = m->sample_point(rng);
      Mat F = m->full_frame(q);
      CHECK(std::abs(F.determinant()) > 1e-3);
      if (m->chart() == ChartKind::UnitSphere) {
        Mat G = F.transpose() * F;
        CHECK((G - Mat::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-12);
      } else {
        // frame volume matches the declared density
        CHECK(m->volume_density(q) == doctest::Approx(1.0 / std::abs(F.determinant())).epsilon(1e-12));
      }
      CHECK(m->volume_density(q) > 0.0);
    }
  }
}

TEST_CASE("analytic brackets agree with finite differences") {
  Rng rng(11);
  for (const auto& m : all_models()) {
    CAPTURE(m->id());
    for (int s = 0; s < 10; ++s) {
      Vec q = m->sample_point(rng);
      BracketTensors an = m->bracket_tensors(q);
      BracketTensors fd = finite_difference_brackets(*m, q);
      CHECK(max_abs_diff(an.b, fd.b) < 1e-6);
      CHECK(max_abs_diff(an.c, fd.c) < 1e-6);
      CHECK(max_abs_diff(an.a, fd.a) < 1e-6);
      CHECK(max_abs_diff(an.d, fd.d) < 1e-6);
      CHECK(max_abs_diff(an.e, fd.e) < 1e-6);
    }
  }
}

TEST_CASE("bracket examples") {
  auto h = make_heisenberg(1);
  Vec q(3);
  q << 0.3, -1.2, 2.0;
  BracketTensors bt = h->bracket_tensors(q);
  CHECK(bt.C(0, 1, 0) == 1.0);
  for (double x : bt.b) CHECK(x == 0.0);
  for (double x : bt.d) CHECK(x == 0.0);
  for (double x : bt.e) CHECK(x == 0.0);

  MartinetModel mt;
  BracketTensors bm = mt.bracket_tensors(q);
  CHECK(bm.C(0, 1, 0) == doctest::Approx(0.3));
  for (double x : bm.d) CHECK(x == 0.0);

  // global quaternion frame on S^3: [X1, X2] = -2 Z, [X1, Z] = 2 X2
  auto c = make_chf(1);
  Rng rng(3);
  Vec p = uniform_on_sphere(rng, 4);
  BracketTensors bc = c->bracket_tensors(p);
  CHECK(bc.C(0, 1, 0) == doctest::Approx(-2.0));
  CHECK(bc.A(0, 0, 1) == doctest::Approx(2.0));
  CHECK(bc.A(1, 0, 0) == doctest::Approx(-2.0));

  SphericalBandModel band(0.1);
  Vec t(2);
  t << 1.0, 0.5;
  CHECK(band.bracket_tensors(t).D(0, 0, 0) == doctest::Approx(-std::cos(1.0) / std::sin(1.0)));
}

TEST_CASE("d is skew in (j, l) on Hopf models") {
  Rng rng(13);
  for (auto m : {make_chf(1), make_chf(2), make_qhf(1)}) {
    CAPTURE(m->id());
    for (int s = 0; s < 10; ++s) {
      Vec q = m->sample_point(rng);
      BracketTensors bt = m->bracket_tensors(q);
      for (int i = 0; i < bt.k; ++i)
        for (int j = 0; j < bt.r; ++j)
          for (int l = 0; l < bt.r; ++l) CHECK(std::abs(bt.D(i, j, l) + bt.D(i, l, j)) < 1e-12);
    }
  }
}

TEST_CASE("analytic hamiltonian gradient matches the frame-based default") {
  Rng rng(17);
  for (const auto& m : all_models()) {
    CAPTURE(m->id());
    for (int s = 0; s < 10; ++s) {
      Vec q = m->sample_point(rng);
      Vec p = standard_normal(rng, m->chart_dim());
      if (m->chart() == ChartKind::UnitSphere) p -= p.dot(q) * q;
      Vec gx, gp, fx, fp;
      m->hamiltonian_gradient(q, p, gx, gp);
      m->Model::hamiltonian_gradient(q, p, fx, fp);
      CHECK((gp - fp).norm() < 1e-10);
      if (m->chart() == ChartKind::UnitSphere) {
        // only the tangential part of dH/dx is meaningful on the sphere
        gx -= gx.dot(q) * q;
        fx -= fx.dot(q) * q;
      }
      CHECK((gx - fx).norm() < 1e-6);
    }
  }
}

TEST_CASE("covector and frame coordinates round trip") {
  Rng rng(19);
  for (const auto& m : all_models()) {
    CAPTURE(m->id());
    Vec q = m->sample_point(rng);
    FrameCovector l{q, standard_normal(rng, m->k()), standard_normal(rng, m->r())};
    Vec p = m->covector(l);
    FrameCovector back = m->frame_coords(q, p);
    CHECK((back.u - l.u).norm() < 1e-12);
    CHECK((back.v - l.v).norm() < 1e-12);
  }
}

TEST_CASE("horizontal normal") {
  auto c = make_chf(1);
  HemisphereDomain hemi(c);
  Vec q(4);
  q << 0.0, 0.0, 0.6, 0.8;
  HorizontalNormal n = horizontal_normal(hemi, q);
  CHECK_FALSE(n.characteristic);
  CHECK(n.vector(0) == doctest::Approx(1.0));
  CHECK(n.frame.norm() == doctest::Approx(1.0));
  q << 0.0, 0.6, 0.0, 0.8;
  n = horizontal_normal(hemi, q);
  // n = P_H e0 / |P_H e0| has e0-component sqrt(1 - y0^2)
  CHECK(n.vector(0) == doctest::Approx(0.8));
  CHECK(hemi.level_gradient(q).dot(n.vector) > 0.0);
  q << 0.0, 1.0, 0.0, 0.0;
  CHECK(horizontal_normal(hemi, q).characteristic);
  q << 0.5, 0.0, 0.0, std::sqrt(0.75);
  CHECK_THROWS_AS(horizontal_normal(hemi, q), PreconditionError);

  HemisphereDomain round(make_round_sphere(2));
  Vec e(3);
  e << 0.0, 0.6, 0.8;
  HorizontalNormal nr = horizontal_normal(round, e);
  CHECK(nr.vector(0) == doctest::Approx(1.0));
  CHECK(nr.vector.norm() == doctest::Approx(1.0));
}

TEST_CASE("characteristic scans") {
  HemisphereDomain chf(make_chf(1));
  CharacteristicScan s = characteristic_scan(chf, 100000, 1e-3, 1);
  CHECK(s.fraction < 1e-2);
  HemisphereDomain round(make_round_sphere(2));
  CHECK(characteristic_scan(round, 20000, 1e-6, 1).fraction == 0.0);
  auto h = make_heisenberg(1);
  Vec lo(3), hi(3);
  lo << -1, -1, -1;
  hi << 1, 1, 1;
  BoxDomain box(h, lo, hi);
  const double f1 = characteristic_scan(box, 100000, 1e-1, 2).fraction;
  const double f2 = characteristic_scan(box, 100000, 1e-2, 2).fraction;
  CHECK(f1 > 0.0);
  CHECK(f2 < f1 / 10.0);
}

TEST_CASE("hemisphere measures") {
  auto c = make_chf(1);
  HemisphereDomain hemi(c);
  CHECK(*hemi.boundary_measure() == doctest::Approx(kPi * kPi).epsilon(1e-13));
  CHECK(*hemi.volume() == doctest::Approx(kPi * kPi).epsilon(1e-13));
  Estimate mc = boundary_measure_mc(hemi, 200000, 3);
  CHECK(std::abs(mc.value - kPi * kPi) < 4.0 * mc.std_error);

  HemisphereDomain q1(make_qhf(1));
  Estimate mq = boundary_measure_mc(q1, 200000, 4);
  CHECK(std::abs(mq.value - *q1.boundary_measure()) < 4.0 * mq.std_error);

  HemisphereDomain r2(make_round_sphere(2));
  CHECK(*r2.boundary_measure() == doctest::Approx(2.0 * kPi));
  CHECK(*r2.volume() == doctest::Approx(2.0 * kPi));
}

TEST_CASE("heisenberg ball geometry") {
  CHECK(heisenberg_distance(0.7, 0.0) == doctest::Approx(0.7));
  CHECK(heisenberg_distance(0.0, 0.3) == doctest::Approx(std::sqrt(4.0 * kPi * 0.3)));
  for (double phi : {0.001, 0.5, 2.0, 4.0, 6.0, -3.0}) {
    double r, z, dr, dz;
    heisenberg_sphere_profile(1.5, phi, r, z, dr, dz);
    CHECK(heisenberg_distance(r, z) == doctest::Approx(1.5).epsilon(1e-10));
    // profile derivatives by central differences
    double r1, z1, r2, z2, a, b;
    const double h = 1e-6;
    heisenberg_sphere_profile(1.5, phi + h, r1, z1, a, b);
    heisenberg_sphere_profile(1.5, phi - h, r2, z2, a, b);
    CHECK(dr == doctest::Approx((r1 - r2) / (2 * h)).epsilon(1e-6));
    CHECK(dz == doctest::Approx((z1 - z2) / (2 * h)).epsilon(1e-6));
  }
  auto h = make_heisenberg(1);
  HeisenbergBallDomain ball(h, 1.0);
  // level gradient against finite differences
  Rng rng(23);
  for (int s = 0; s < 20; ++s) {
    Vec q = ball.sample_interior(rng);
    Vec g = ball.level_gradient(q);
    for (int i = 0; i < 3; ++i) {
      Vec a = q, b = q;
      a(i) += 1e-6;
      b(i) -= 1e-6;
      CHECK(g(i) == doctest::Approx((ball.level(a) - ball.level(b)) / 2e-6).epsilon(1e-5).scale(1.0));
    }
  }
  // homogeneous dimension 4: sigma/omega = 4/R
  const double v = *ball.volume(), s = *ball.boundary_measure();
  CHECK(s / v == doctest::Approx(4.0).epsilon(1e-8));
  HeisenbergBallDomain ball2(h, 2.0);
  CHECK(*ball2.volume() == doctest::Approx(16.0 * v).epsilon(1e-10));
  // volume against a hit-or-miss estimate over a bounding box
  auto hits = map_samples<double>(200000, 9, 0, Execution::Serial, [&](Rng& r, std::size_t) {
    Vec p(3);
    p << 2 * uniform01(r) - 1, 2 * uniform01(r) - 1, (2 * uniform01(r) - 1) * 0.2;
    return ball.level(p) >= 0 ? 4.0 * 0.4 : 0.0;
  });
  Estimate hv = mean_estimate(hits);
  CHECK(std::abs(hv.value - v) < 4.0 * hv.std_error);
  Estimate ms = boundary_measure_mc(ball, 100000, 5);
  CHECK(std::abs(ms.value - s) < 4.0 * ms.std_error);
}

TEST_CASE("band domain") {
  auto b = std::make_shared<SphericalBandModel>(0.1);
  BandChartDomain band(b);
  Estimate ms = boundary_measure_mc(band, 1000, 1);
  CHECK(ms.value == doctest::Approx(4.0 * kPi * std::cos(0.1)).epsilon(1e-12));
  Rng rng(1);
  double mean_cos = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) mean_cos += std::cos(band.sample_interior(rng)(0));
  CHECK(std::abs(mean_cos / n) < 0.002);
}
