#include <doctest.h>

#include "srlab/spectral.hpp"

#include <cmath>
#include <sstream>

using namespace srlab;

TEST_CASE("analytic eigenfunctions of the cylindrical operators") {
  CHECK(cylindrical_residual(SpectralCase::Chf, 1) < 1e-10);
  CHECK(cylindrical_residual(SpectralCase::Qhf, 1) < 1e-10);
  CHECK(cylindrical_residual(SpectralCase::Sphere, 2) < 1e-12);
  for (int d = 2; d <= 3; ++d) {
    CHECK(cylindrical_residual(SpectralCase::Chf, d) < 1e-10);
    CHECK(cylindrical_residual(SpectralCase::Qhf, d) < 1e-10);
  }
}

TEST_CASE("singular rings are rejected") {
  CHECK_THROWS_AS(cylindrical_residual(SpectralCase::Chf, 1, {{0.1, 0.0}}), DomainError);
  CHECK_THROWS_AS(cylindrical_residual(SpectralCase::Chf, 1, {{0.1, 0.5 * kPi}}), DomainError);
  CHECK_THROWS_AS(cylindrical_residual(SpectralCase::Qhf, 1, {{0.0, 0.3}}), DomainError);
  CHECK_THROWS_AS(cylindrical_residual(SpectralCase::Qhf, 1, {{kPi, 0.3}}), DomainError);
  CHECK_THROWS_AS(parse_spectral_case("torus"), ConfigError);
}

TEST_CASE("separated eigenvalues converge to d, 2d, 4d") {
  struct Row {
    SpectralCase c;
    int d;
    double expect;
  };
  for (Row row : {Row{SpectralCase::Sphere, 2, 2.0}, Row{SpectralCase::Sphere, 1, 1.0}, Row{SpectralCase::Chf, 1, 2.0},
                  Row{SpectralCase::Qhf, 1, 4.0}, Row{SpectralCase::Chf, 2, 4.0}}) {
    CAPTURE(to_string(row.c));
    CAPTURE(row.d);
    SpectralResult r = separated_eigensolve(row.c, row.d, 4096);
    CHECK(std::abs(r.lambda.back() - row.expect) < 1e-3);
    CHECK(std::abs(r.extrapolated - row.expect) < 1e-6);
    // discrete min-max: the analytic eigenfunction's quotient bounds the discrete eigenvalue
    for (std::size_t i = 0; i < r.grids.size(); ++i) {
      CHECK(r.rayleigh_analytic[i] >= r.lambda[i] * (1.0 - 1e-10));
      CHECK(r.rayleigh_analytic[i] - r.lambda[i] < 1e-4);
    }
    // errors shrink by about 4 per halving
    const double e0 = std::abs(r.lambda[0] - row.expect), e1 = std::abs(r.lambda[1] - row.expect);
    CHECK(e0 / e1 == doctest::Approx(4.0).epsilon(0.1));
    // eigenfunction is cos r up to scale
    for (std::size_t i = 0; i < r.r.size(); i += 512) CHECK(r.g[i] == doctest::Approx(std::cos(r.r[i]) / std::cos(r.r[0])).epsilon(1e-4));
  }
}

TEST_CASE("convergence table") {
  SpectralResult r = separated_eigensolve(SpectralCase::Chf, 1, 256);
  std::ostringstream os;
  write_convergence_csv(os, r);
  const std::string s = os.str();
  CHECK(s.rfind("nodes,lambda1\n64,", 0) == 0);
  CHECK(s.find("inf,") != std::string::npos);
  CHECK_THROWS_AS(separated_eigensolve(SpectralCase::Chf, 1, 10), PreconditionError);
}

TEST_CASE("interval eigenvalues") {
  // unit weight: (pi / (b - a))^2
  IntervalEigen e = interval_dirichlet_eigenvalue([](double) { return 1.0; }, 0.0, 2.0, 1024);
  CHECK(e.extrapolated == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-10));
  // weight x on (1, 2): Bessel cross product J0(k)Y0(2k) - J0(2k)Y0(k) = 0 at k^2 = 9.753...
  IntervalEigen r = interval_dirichlet_eigenvalue([](double x) { return x; }, 1.0, 2.0, 2048);
  CHECK(r.extrapolated == doctest::Approx(3.12303091959569 * 3.12303091959569).epsilon(1e-8));
  // the band lies below pi^2 / (2 eps)^2 by about 1/2
  IntervalEigen b = band_eigenvalue(0.1);
  CHECK(b.extrapolated < kPi * kPi / 0.04);
  CHECK(kPi * kPi / 0.04 - b.extrapolated == doctest::Approx(0.5).epsilon(0.02));
  CHECK_THROWS_AS(band_eigenvalue(0.0), PreconditionError);
}
