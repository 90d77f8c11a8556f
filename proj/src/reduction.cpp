#include "srlab/reduction.hpp"

#include "srlab/flow.hpp"
#include "srlab/quadrature.hpp"
#include "srlab/sampling.hpp"

#include <cmath>

namespace srlab {

namespace {

double h1_rate(const BracketTensors& bt, const Vec& u) {
  double worst = 0.0;
  for (int j = 0; j < bt.r; ++j) {
    double s = 0.0;
    for (int i = 0; i < bt.k; ++i)
      for (int l = 0; l < bt.k; ++l) s += u(i) * bt.A(i, j, l) * u(l);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

double divergence_coefficient(const BracketTensors& bt, const Vec& u) {
  double s = 0.0;
  for (int i = 0; i < bt.k; ++i)
    for (int j = 0; j < bt.r; ++j) s += u(i) * bt.D(i, j, j);
  return s;
}

}  // namespace

ReductionCertificate check_H1(const Model& model, std::size_t n, std::uint64_t seed, double tol) {
  ReductionCertificate c;
  c.tolerance = tol;
  c.samples = n;
  Rng rng = chunk_engine(seed, 21, 0);
  for (std::size_t s = 0; s < n; ++s) {
    Vec q = model.sample_point(rng);
    Vec u = uniform_on_sphere(rng, model.k());
    c.h1_residual = std::max(c.h1_residual, h1_rate(model.bracket_tensors(q), u));
  }
  // dynamic witness: |v| along a few reduced extremals
  const std::size_t nd = std::min<std::size_t>(n, 6);
  const double T = model.length_scale();
  for (std::size_t s = 0; s < nd; ++s) {
    Vec q = model.sample_point(rng);
    FrameCovector l{q, uniform_on_sphere(rng, model.k()), Vec::Zero(model.r())};
    GeodesicTrace tr = integrate_geodesic(model, l, T);
    c.h1_dynamic = std::max(c.h1_dynamic, tr.v_drift / T);
  }
  c.h1_pass = c.h1_residual < tol && c.h1_dynamic < tol;
  return c;
}

ReductionCertificate check_H2(const Model& model, std::size_t n, std::uint64_t seed, double tol) {
  ReductionCertificate c;
  c.tolerance = tol;
  c.samples = n;
  Rng rng = chunk_engine(seed, 22, 0);
  const bool hopf = model.chart() == ChartKind::UnitSphere && model.r() > 0;
  const bool carnot = dynamic_cast<const CarnotModel*>(&model) != nullptr;
  double skew = 0.0, trace = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    Vec q = model.sample_point(rng);
    Vec u = uniform_on_sphere(rng, model.k());
    BracketTensors bt = model.bracket_tensors(q);
    c.h2_residual = std::max(c.h2_residual, std::abs(divergence_coefficient(bt, u)));
    if (hopf) {
      for (int i = 0; i < bt.k; ++i)
        for (int j = 0; j < bt.r; ++j)
          for (int l = 0; l < bt.r; ++l) skew = std::max(skew, std::abs(bt.D(i, j, l) + bt.D(i, l, j)));
    }
    if (carnot) {
      for (int i = 0; i < bt.k; ++i) {
        double t = 0.0;
        for (int j = 0; j < bt.k; ++j) t += bt.B(i, j, j);
        for (int j = 0; j < bt.r; ++j) t += bt.D(i, j, j);
        trace = std::max(trace, std::abs(t));
      }
    }
  }
  if (hopf) c.skew_residual = skew;
  if (carnot) c.trace_residual = trace;
  c.h2_pass = c.h2_residual < tol && (!hopf || skew < tol) && (!carnot || trace < tol);
  return c;
}

ReductionCertificate certify_reduction(std::shared_ptr<const Model> model, std::size_t n, std::uint64_t seed,
                                       double tol) {
  ReductionCertificate h1 = check_H1(*model, n, seed, tol);
  ReductionCertificate c = check_H2(*model, n, seed, tol);
  c.h1_residual = h1.h1_residual;
  c.h1_dynamic = h1.h1_dynamic;
  c.h1_pass = h1.h1_pass;
  if (model->r() >= 2) {
    // finite-difference brackets: residual floor is the differencing error
    RotatedVerticalModel rot(model);
    ReductionCertificate r = check_H2(rot, std::min<std::size_t>(n, 50), seed, tol);
    c.rotated_frame_h2_residual = r.h2_residual;
  }
  return c;
}

// ---------------------------------------------------------------------------

namespace {

// Gauss-Legendre on [a, b] after the smoothstep substitution, which flattens
// endpoint singularities such as |cos|^p at the panel edges.
template <class F>
double panel(F&& f, double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * (g.nodes[i] + 1.0);
    const double w = t * t * (3.0 - 2.0 * t);
    const double dw = 6.0 * t * (1.0 - t);
    s += 0.5 * g.weights[i] * dw * f(a + (b - a) * w);
  }
  return s * (b - a);
}

template <class F>
double angle_integral(F&& f, double len, int nodes) {
  // [0, pi] in two panels, [0, 2 pi] in four
  const int panels = len > kPi + 1e-12 ? 4 : 2;
  const int per = std::max(2, nodes / panels);
  const double w = len / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) s += panel(f, p * w, (p + 1) * w, per);
  return s;
}

double deterministic(int k, const std::function<double(const Vec&)>& f, int nodes, const Mat& B) {
  if (k == 1) {
    Vec u(1);
    u(0) = 1.0;
    const double a = f(u);
    u(0) = -1.0;
    return a + f(u);
  }
  Vec s(k);
  auto eval = [&]() { return f(B * s); };
  if (k == 2) {
    return angle_integral(
        [&](double t) {
          s << std::cos(t), std::sin(t);
          return eval();
        },
        2.0 * kPi, nodes);
  }
  if (k == 3) {
    return angle_integral(
        [&](double t1) {
          const double c1 = std::cos(t1), s1 = std::sin(t1);
          return s1 * angle_integral(
                          [&](double t2) {
                            s << c1, s1 * std::cos(t2), s1 * std::sin(t2);
                            return eval();
                          },
                          2.0 * kPi, nodes);
        },
        kPi, nodes);
  }
  return angle_integral(
      [&](double t1) {
        const double c1 = std::cos(t1), s1 = std::sin(t1);
        return s1 * s1 * angle_integral(
                             [&](double t2) {
                               const double c2 = std::cos(t2), s2 = std::sin(t2);
                               return s2 * angle_integral(
                                               [&](double t3) {
                                                 s << c1, s1 * c2, s1 * s2 * std::cos(t3), s1 * s2 * std::sin(t3);
                                                 return eval();
                                               },
                                               2.0 * kPi, nodes);
                             },
                             kPi, nodes);
      },
      kPi, nodes);
}

Mat adapted_basis(int k, const Vec* pole) {
  Mat B = Mat::Identity(k, k);
  if (!pole) return B;
  if (pole->size() != k) throw DomainError("fiber_quadrature: pole has the wrong dimension");
  Mat A = Mat::Identity(k, k);
  A.col(0) = pole->normalized();
  Eigen::HouseholderQR<Mat> qr(A);
  B = qr.householderQ() * Mat::Identity(k, k);
  if (B.col(0).dot(A.col(0)) < 0) B.col(0) = -B.col(0);
  return B;
}

}  // namespace

Estimate fiber_quadrature(int k, const std::function<double(const Vec&)>& f, const FiberScheme& scheme,
                          const Vec* pole) {
  if (k < 1) throw DomainError("fiber_quadrature: k must be positive");
  bool det = scheme.kind == FiberScheme::Kind::Deterministic ||
             (scheme.kind == FiberScheme::Kind::Auto && k <= 4);
  if (det && k > 4) throw PreconditionError("deterministic fiber quadrature supports k <= 4");
  Estimate e;
  if (det) {
    Mat B = adapted_basis(k, pole);
    e.value = deterministic(k, f, scheme.nodes, B);
    if (scheme.verify) {
      const double coarse = deterministic(k, f, std::max(8, scheme.nodes / 2), B);
      if (std::abs(coarse - e.value) > scheme.verify_tol * std::max(1.0, std::abs(e.value)))
        throw NumericError("fiber quadrature refinement stalled");
    }
    return e;
  }
  const double area = sphere_area(k - 1);
  auto vals = map_samples<double>(scheme.mc_samples, scheme.seed, 31, Execution::Serial,
                                  [&](Rng& rng, std::size_t) { return area * f(uniform_on_sphere(rng, k)); });
  return mean_estimate(vals);
}

Estimate fiber_quadrature(const Model& model, const Vec& q, const std::function<double(const FrameCovector&)>& f,
                          const FiberScheme& scheme, const Vec* pole) {
  model.check_chart(q);
  const Vec v = Vec::Zero(model.r());
  return fiber_quadrature(
      model.k(), [&](const Vec& u) { return f(FrameCovector{q, u, v}); }, scheme, pole);
}

}  // namespace srlab
