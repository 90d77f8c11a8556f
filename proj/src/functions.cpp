#include "srlab/functions.hpp"

#include <cmath>

namespace srlab {

TestFunction cos_delta() {
  TestFunction f;
  f.id = "cos_delta";
  f.value = [](const Vec& q) { return q(0); };
  f.gradient = [](const Vec& q) {
    Vec g = Vec::Zero(q.size());
    g(0) = 1.0;
    return g;
  };
  return f;
}

TestFunction bump(Vec center, double rho) {
  TestFunction f;
  f.id = "bump";
  const double r2 = rho * rho;
  f.value = [center, r2](const Vec& q) {
    const double s = (q - center).squaredNorm() / r2;
    return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
  };
  f.gradient = [center, r2](const Vec& q) {
    Vec d = q - center;
    const double s = d.squaredNorm() / r2;
    if (s >= 1.0) return Vec(Vec::Zero(q.size()));
    const double om = 1.0 - s;
    const double v = std::exp(1.0 - 1.0 / om);
    return Vec(v * (-1.0 / (om * om)) * (2.0 / r2) * d);
  };
  return f;
}

double horizontal_gradient_sq(const Model& model, const TestFunction& f, const Vec& q) {
  Vec g = f.gradient(q);
  return g.dot(model.cometric(q) * g);
}

CovectorFunction constant_function(double c) {
  return [c](const Vec&, const Vec&) { return c; };
}

CovectorFunction horizontal_derivative_sq(std::shared_ptr<const Model> model, TestFunction f) {
  return [model, f](const Vec& x, const Vec& p) {
    const double d = p.dot(model->cometric(x) * f.gradient(x));
    return d * d;
  };
}

CovectorFunction half_fiber_indicator(std::shared_ptr<const Model> model, Vec e) {
  return [model, e](const Vec& x, const Vec& p) { return p.dot(model->cometric(x) * e) > 0.0 ? 1.0 : 0.0; };
}

}  // namespace srlab
