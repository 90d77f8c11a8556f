#include "srlab/quadrature.hpp"

#include <Eigen/Dense>

#include <map>
#include <mutex>
#include <stdexcept>

namespace srlab {

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  // Golub-Welsch: eigenvalues of the Jacobi matrix
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    T(i, i - 1) = b;
    T(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g.weights[i] * f(mid + half * g.nodes[i]);
  return s * half;
}

double integrate_gl_composite(const std::function<double(double)>& f, double a, double b, int panels,
                              int n) {
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) s += integrate_gl(f, a + p * w, a + (p + 1) * w, n);
  return s;
}

}  // namespace srlab
