#pragma once

#include <functional>
#include <vector>

namespace srlab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes (Golub-Welsch), cached per n.
const GaussRule& gauss_legendre(int n);

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n = 64);

// Composite Gauss-Legendre: [a, b] split into `panels` equal pieces.
double integrate_gl_composite(const std::function<double(double)>& f, double a, double b,
                              int panels, int n = 32);

}  // namespace srlab
