#include <doctest.h>

#include "srlab/carnot.hpp"
#include "srlab/flow.hpp"
#include "srlab/inequalities.hpp"
#include "srlab/reduction.hpp"

#include <cmath>
#include <sstream>

using namespace srlab;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

CarnotSpec random_spec(Rng& rng, int k, int m2) {
  CarnotSpec s;
  s.k = k;
  s.m2 = m2;
  s.c.assign(k * k * m2, 0.0);
  std::normal_distribution<double> n;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      for (int l = 0; l < m2; ++l) {
        s.at(i, j, l) = n(rng);
        s.at(j, i, l) = -s.at(i, j, l);
      }
  return s;
}

CarnotSpec abelian(int k, int m2) {
  CarnotSpec s;
  s.k = k;
  s.m2 = m2;
  s.c.assign(k * k * m2, 0.0);
  return s;
}

}  // namespace

TEST_CASE("spec parsing") {
  CarnotSpec s = parse_carnot_spec_string("# heisenberg\n2 1\n1 2 1 1.0\n");
  CHECK(s.k == 2);
  CHECK(s.m2 == 1);
  CHECK(s.at(0, 1, 0) == 1.0);
  CHECK(s.at(1, 0, 0) == -1.0);
  CHECK(is_bracket_generating(s));
  std::ostringstream os;
  write_carnot_spec(os, s);
  CHECK(parse_carnot_spec_string(os.str()).c == s.c);

  CHECK_THROWS_AS(parse_carnot_spec_string(""), ConfigError);
  CHECK_THROWS_AS(parse_carnot_spec_string("2 1\n1 3 1 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_carnot_spec_string("2 1\n1 2 1 1.0\n2 1 1 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_carnot_spec_string("2 1\n1 1 1 2.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_carnot_spec_string("2 1\n1 2 one\n"), ConfigError);
  CHECK_NOTHROW(parse_carnot_spec_string("2 1\n1 2 1 1.0\n2 1 1 -1.0\n"));

  CHECK_FALSE(is_bracket_generating(abelian(2, 1)));
  // free step-2 on 3 generators
  CarnotSpec f = parse_carnot_spec_string("3 3\n1 2 1 1\n1 3 2 1\n2 3 3 1\n");
  CHECK(is_bracket_generating(f));
  CarnotSpec bad = parse_carnot_spec_string("3 2\n1 2 1 1\n1 2 2 2\n");
  CHECK_FALSE(is_bracket_generating(bad));
}

TEST_CASE("group law") {
  const CarnotSpec h = heisenberg_spec(1);
  for (double t : {0.3, 1.0, -2.0}) {
    Vec p = group_multiply(h, v3(0, 1, 0), v3(t, 0, 0));
    CHECK((p - v3(t, 1, -t / 2)).norm() < 1e-15);
  }
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    CarnotSpec s = random_spec(rng, 3, 2);
    Vec a = standard_normal(rng, 5), b = standard_normal(rng, 5), c = standard_normal(rng, 5);
    CHECK((group_multiply(s, a, Vec::Zero(5)) - a).norm() == 0.0);
    CHECK(group_multiply(s, a, group_inverse(s, a)).norm() < 1e-15);
    Vec l = group_multiply(s, group_multiply(s, a, b), c), r = group_multiply(s, a, group_multiply(s, b, c));
    CHECK((l - r).norm() < 1e-12);
  }
  CHECK_THROWS_AS(group_multiply(h, v3(0, 0, 0), Vec::Zero(2)), DomainError);
}

TEST_CASE("reduced geodesics are left-translated lines and match the flow") {
  const CarnotSpec h = heisenberg_spec(1);
  Vec u(2);
  u << 1.0, 0.0;
  CHECK((reduced_geodesic(h, v3(0, 1, 0), u, 1.0) - v3(1, 1, -0.5)).norm() < 1e-15);
  CHECK((reduced_geodesic(h, Vec::Zero(3), u, 0.7) - v3(0.7, 0, 0)).norm() < 1e-15);

  Rng rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    CarnotSpec s = trial == 0 ? h : random_spec(rng, 3, 2);
    auto model = std::make_shared<CarnotModel>("carnot-step2", s);
    Vec q = standard_normal(rng, s.dim()), w = uniform_on_sphere(rng, s.k);
    GeodesicTrace tr = integrate_geodesic(*model, FrameCovector{q, w, Vec::Zero(s.m2)}, 2.0);
    double gap = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      gap = std::max(gap, (tr.states[i].q - reduced_geodesic(s, q, w, tr.times[i])).norm());
    CHECK(gap < 1e-8);
  }
}

TEST_CASE("every step-2 spec passes the reduction certificates") {
  Rng rng(9);
  for (auto [k, m2] : {std::pair{2, 1}, std::pair{3, 2}, std::pair{4, 3}}) {
    auto model = std::make_shared<CarnotModel>("carnot-step2", random_spec(rng, k, m2));
    ReductionCertificate c = certify_reduction(model, 20, 3);
    CHECK(c.h1_pass);
    CHECK(c.h2_pass);
  }
}

TEST_CASE("chords are left invariant") {
  auto h = make_heisenberg(1);
  HeisenbergBallDomain ball(*&h, 1.0);
  const CarnotSpec& s = h->spec();
  Rng rng(2);
  Vec g = v3(0.4, -1.2, 0.3);
  LevelFunction shifted = [&](const Vec& p) { return ball.level(group_multiply(s, group_inverse(s, g), p)); };
  for (int i = 0; i < 5; ++i) {
    Vec q = ball.sample_interior(rng), u = uniform_on_sphere(rng, 2);
    Chord a = line_chord(s, ball, q, u);
    Chord b = line_chord(s, shifted, group_multiply(s, g, q), u, ball.length_scale());
    CHECK(std::abs(a.forward - b.forward) < 1e-12);
    CHECK(std::abs(a.backward - b.backward) < 1e-12);
  }
}

TEST_CASE("horizontal diameters") {
  SUBCASE("heisenberg ball radius R -> 2R") {
    auto h = make_heisenberg(1);
    for (double R : {1.0, 0.5}) {
      HeisenbergBallDomain ball(h, R);
      HorizontalDiameter d = horizontal_diameter(h->spec(), ball, 400, 4);
      CHECK(d.lower <= 2.0 * R + 1e-8);
      CHECK(d.lower == doctest::Approx(2.0 * R).epsilon(1e-3));
      CHECK(d.upper >= d.lower);
      CHECK(d.lower >= d.sampled);
    }
  }
  SUBCASE("abelian box: sqrt(k)") {
    auto m = std::make_shared<CarnotModel>("abelian", abelian(2, 1));
    BoxDomain box(m, Vec::Zero(3), Vec::Ones(3));
    HorizontalDiameter d = horizontal_diameter(m->spec(), box, 300, 5);
    // brute force over corner pairs of the first-layer square
    double brute = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        brute = std::max(brute, std::hypot((a & 1) - (b & 1), (a >> 1) - (b >> 1)));
    CHECK(d.lower == doctest::Approx(brute).epsilon(1e-4));
    CHECK(d.lower <= brute + 1e-9);
  }
  SUBCASE("heisenberg thin cube: at least eps sqrt(2) and the dense grid value") {
    const double eps = 0.5;
    auto h = make_heisenberg(1);
    BoxDomain cube(h, Vec::Zero(3), v3(eps, eps, eps * eps));
    HorizontalDiameter d = horizontal_diameter(h->spec(), cube, 400, 6);
    CHECK(d.lower >= eps * std::sqrt(2.0) * (1.0 - 1e-6));
    double grid = 0.0;
    const int n = 9, na = 72;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 1; l < n - 1; ++l) {
          Vec q = v3(eps * i / (n - 1), eps * j / (n - 1), eps * eps * l / (n - 1));
          for (int a = 0; a < na; ++a) {
            Vec u(2);
            u << std::cos(2 * kPi * a / na), std::sin(2 * kPi * a / na);
            grid = std::max(grid, line_chord(h->spec(), cube, q, u).length());
          }
        }
    CHECK(d.lower >= grid - 1e-3 * eps);
  }
}

TEST_CASE("carnot corollaries") {
  SUBCASE("heisenberg ball") {
    auto h = make_heisenberg(1);
    const double R = 1.0;
    HeisenbergBallDomain ball(h, R);
    CarnotBounds b = carnot_bounds(h->spec(), ball, 400, 4000, 2);
    CHECK(*b.lambda1_analytic_bound == doctest::Approx(kPi * kPi / (2.0 * R * R)));
    CHECK(b.lambda1_bound == doctest::Approx(kPi * kPi / (2.0 * R * R)).epsilon(3e-3));
    CHECK(b.perimeter_bound == doctest::Approx(kPi / (2.0 * R)).epsilon(3e-3));
    CHECK(b.perimeter_holds);
    CHECK(b.sigma_over_omega.value == doctest::Approx(4.0 / R).epsilon(0.02));
  }
  SUBCASE("abelian unit cube: bound pi^2 below the exact 2 pi^2") {
    auto m = std::make_shared<CarnotModel>("abelian", abelian(2, 1));
    BoxDomain box(m, Vec::Zero(3), Vec::Ones(3));
    CarnotBounds b = carnot_bounds(m->spec(), box, 300, 2000, 3);
    CHECK(b.lambda1_bound == doctest::Approx(kPi * kPi).epsilon(1e-3));
    CHECK(b.lambda1_bound < 2.0 * kPi * kPi);
    CHECK(b.perimeter_holds);
  }
}
