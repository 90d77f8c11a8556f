#pragma once

#include "srlab/types.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace srlab {

enum class SpectralCase { Sphere, Chf, Qhf };

SpectralCase parse_spectral_case(const std::string& s);
const char* to_string(SpectralCase c);

// rank of the distribution: d, 2d, 4d
int spectral_rank(SpectralCase c, int d);

// max |L Phi + k Phi| of the cylindrical operator applied to the analytic
// eigenfunction at the given (angle, r) points; the angle is delta (sphere,
// unused), theta (chf) or eta (qhf).
double cylindrical_residual(SpectralCase c, int d, const std::vector<std::array<double, 2>>& points);
// shifted n x n grid avoiding the singular rings
double cylindrical_residual(SpectralCase c, int d, int n = 64);

struct SpectralResult {
  SpectralCase kase = SpectralCase::Sphere;
  int d = 1;
  std::vector<int> grids;
  std::vector<double> lambda;           // per grid
  std::vector<double> rayleigh_analytic;  // discrete Rayleigh quotient of the analytic eigenfunction
  double extrapolated = 0.0;
  double extrapolation_error = 0.0;  // gap between the last two Richardson levels
  double analytic = 0.0;
  double residual = 0.0;
  std::vector<double> r;  // finest-grid eigenfunction, normalised to g(r_0) = 1
  std::vector<double> g;
};

// lowest eigenvalue of the separated radial problem, cell-centred grids
// n, 2n, 4n with Richardson extrapolation
SpectralResult separated_eigensolve(SpectralCase c, int d, int finest = 4096);

// smallest eigenvalue of the discrete radial problem on one grid
double radial_eigenvalue(SpectralCase c, int d, int n, std::vector<double>* r = nullptr,
                         std::vector<double>* g = nullptr, double* rayleigh_analytic = nullptr);

// lowest Dirichlet eigenvalue of -(w g')'/w on (a, b), cell-centred grids
// n/4, n/2, n with Richardson extrapolation
struct IntervalEigen {
  std::vector<int> grids;
  std::vector<double> lambda;
  double extrapolated = 0.0;
  double extrapolation_error = 0.0;
};
IntervalEigen interval_dirichlet_eigenvalue(const std::function<double(double)>& w, double a, double b,
                                            int finest = 4096);
// the band pi/2 - eps <= theta <= pi/2 + eps of S^2 with weight sin(theta): lowest
// eigenvalue of the sub-Laplacian of span{d/dtheta} (equal to Laplace-Beltrami's)
IntervalEigen band_eigenvalue(double eps, int finest = 4096);

// `nodes,lambda1` rows, then the extrapolated value with nodes = inf
void write_convergence_csv(std::ostream& os, const SpectralResult& res);

}  // namespace srlab
