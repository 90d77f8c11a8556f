#include <doctest.h>

#include "srlab/functions.hpp"
#include "srlab/santalo.hpp"

#include <chrono>
#include <cmath>

using namespace srlab;

namespace {

SantaloOptions opts_n(std::size_t n, std::uint64_t seed = 7) {
  SantaloOptions o;
  o.n = n;
  o.seed = seed;
  return o;
}

bool within_3se(const Estimate& e, double target) { return std::abs(e.value - target) <= 3.0 * e.std_error + 1e-9; }

}  // namespace

TEST_CASE("inward direction sampler has density proportional to <u, n>") {
  Rng rng(3);
  for (int k : {1, 2, 3, 4}) {
    Vec nu = uniform_on_sphere(rng, k);
    // E[<u,n>] under density u1 on the hemisphere: int u1^2 / int u1
    const double mean_expected = k == 1 ? 1.0 : (k == 2 ? kPi / 4.0 : (k == 3 ? 2.0 / 3.0 : 3.0 * kPi / 16.0));
    std::vector<double> xs;
    for (int i = 0; i < 40000; ++i) {
      Vec u = sample_inward_direction(rng, nu);
      REQUIRE(std::abs(u.norm() - 1.0) < 1e-12);
      REQUIRE(u.dot(nu) >= 0.0);
      xs.push_back(u.dot(nu));
    }
    Estimate e = mean_estimate(xs);
    CHECK(within_3se(e, mean_expected));
  }
}

TEST_CASE("F = 1 on the chf(1) hemisphere balances at 2 pi^3") {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  auto res = santalo_balance(dom, {constant_function(1.0)}, opts_n(1500));
  const double target = 2.0 * std::pow(kPi, 3);
  CHECK(res[0].lhs.value == doctest::Approx(target).epsilon(1e-12));
  CHECK(res[0].capped_fraction == 0.0);
  CHECK(within_3se(res[0].rhs, target));
  CHECK(res[0].balanced);
  CHECK(res[0].characteristic_fraction == 0.0);
}

TEST_CASE("F = 1 on the round 2-sphere hemisphere balances at 4 pi^2") {
  auto s2 = make_round_sphere(2);
  HemisphereDomain dom(s2);
  auto res = santalo_balance(dom, {constant_function(1.0)}, opts_n(1500));
  const double target = 4.0 * kPi * kPi;
  CHECK(res[0].lhs.value == doctest::Approx(target).epsilon(1e-12));
  CHECK(within_3se(res[0].rhs, target));
  // every inward chord of a great hemisphere has length pi, so only sigma varies: none on S^2
  CHECK(res[0].rhs.std_error < 1e-6 * target);
  CHECK(res[0].balanced);
}

TEST_CASE("F = 0 gives zero on both sides") {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  auto res = santalo_balance(dom, {constant_function(0.0)}, opts_n(300));
  CHECK(res[0].lhs.value == 0.0);
  CHECK(res[0].rhs.value == 0.0);
  CHECK(res[0].balanced);
}

TEST_CASE("half-fiber indicator and squared horizontal derivative balance") {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  Vec e = Vec::Zero(4);
  e(1) = 1.0;
  std::vector<CovectorFunction> F{half_fiber_indicator(chf, e), horizontal_derivative_sq(chf, cos_delta())};
  auto res = santalo_balance(dom, F, opts_n(2000, 11));
  for (const auto& r : res) {
    CHECK(r.balanced);
    CHECK(r.lhs.value >= 0.0);
    CHECK(r.rhs.value >= 0.0);
  }
  // by the symmetry u -> -u the indicator takes half of the F = 1 mass
  CHECK(within_3se(res[0].lhs, std::pow(kPi, 3)));
}

TEST_CASE("band chart, k = 1: rhs is 2 eps sigma") {
  const double eps = 0.1;
  auto band = std::make_shared<SphericalBandModel>(eps);
  BandChartDomain dom(band);
  auto rhs = estimate_rhs(dom, {constant_function(1.0)}, opts_n(200));
  const double sigma = 4.0 * kPi * std::cos(eps);
  CHECK(rhs[0].value.value == doctest::Approx(2.0 * eps * sigma).epsilon(1e-8));
  auto lhs = estimate_lhs(dom, {constant_function(1.0)}, opts_n(200));
  CHECK(lhs[0].value.value == doctest::Approx(2.0 * 4.0 * kPi * std::sin(eps)).epsilon(1e-12));
}

TEST_CASE("stderr shrinks like 1/sqrt(N)") {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  auto a = estimate_rhs(dom, {constant_function(1.0)}, opts_n(1024, 5));
  auto b = estimate_rhs(dom, {constant_function(1.0)}, opts_n(2048, 6));
  const double ratio = b[0].value.std_error / a[0].value.std_error;
  CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));
}

TEST_CASE("serial and parallel estimates are bit-identical") {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  SantaloOptions o = opts_n(600, 9);
  o.exec = Execution::Serial;
  auto s = estimate_rhs(dom, {constant_function(1.0)}, o);
  o.exec = Execution::Parallel;
  auto p = estimate_rhs(dom, {constant_function(1.0)}, o);
  CHECK(s[0].value.value == p[0].value.value);
  CHECK(s[0].value.std_error == p[0].value.std_error);
}

TEST_CASE("visibility angles") {
  Rng rng(4);
  SUBCASE("chf(1) hemisphere") {
    auto chf = make_chf(1);
    HemisphereDomain dom(chf);
    std::vector<Vec> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(dom.sample_interior(rng));
    auto rep = visibility_angles(dom, pts, 24, 1);
    CHECK(rep.theta_inf == 1.0);
    CHECK(rep.cut_known);
    CHECK(rep.theta_opt_inf == 1.0);
    CHECK(rep.capped_fraction == 0.0);
  }
  SUBCASE("heisenberg unit ball") {
    auto h = make_heisenberg(1);
    HeisenbergBallDomain dom(h, 1.0);
    std::vector<Vec> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(dom.sample_interior(rng));
    auto rep = visibility_angles(dom, pts, 24, 2);
    CHECK(rep.theta_inf == 1.0);
  }
  SUBCASE("full Riemannian band: equatorial geodesics never exit") {
    auto s2 = make_round_sphere(2);
    SphereSlabDomain dom(s2, 0.1);
    Vec q = Vec::Zero(3);
    q(0) = 1.0;
    auto rep = visibility_angles(dom, {q}, 200, 3);
    CHECK(rep.theta_inf < 1.0);
    // inclinations below eps stay inside: invisible fraction ~ 2 * 2 eps / (2 pi)
    CHECK(rep.theta_inf == doctest::Approx(1.0 - 2.0 * 0.1 / kPi).epsilon(0.05));
    CHECK(rep.theta_inf_capped_visible == 1.0);
    CHECK(rep.capped_fraction > 0.0);
  }
}

TEST_CASE("estimators reject bad input") {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  CHECK_THROWS_AS(estimate_lhs(dom, {constant_function(1.0)}, opts_n(0)), PreconditionError);
  CHECK_THROWS_AS(visibility_angles(dom, {}, 10, 1), PreconditionError);
}
