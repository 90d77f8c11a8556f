#pragma once

#include "srlab/flow.hpp"
#include "srlab/model.hpp"

#include <functional>
#include <memory>
#include <string>

namespace srlab {

// Smooth test function on a chart with its exact chart gradient.
struct TestFunction {
  std::string id;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

// q0 on sphere charts: cos of the distance to the pole e0
TestFunction cos_delta();
// exp(1 - 1/(1 - s)), s = |q - c|^2 / rho^2, supported in the chart ball |q - c| < rho
TestFunction bump(Vec center, double rho);

// |grad_H f|^2 = grad f^T G grad f
double horizontal_gradient_sq(const Model& model, const TestFunction& f, const Vec& q);

CovectorFunction constant_function(double c);
// <lambda, grad_H f>^2
CovectorFunction horizontal_derivative_sq(std::shared_ptr<const Model> model, TestFunction f);
// 1[<lambda, G e> > 0] for a fixed chart vector e
CovectorFunction half_fiber_indicator(std::shared_ptr<const Model> model, Vec e);

}  // namespace srlab
