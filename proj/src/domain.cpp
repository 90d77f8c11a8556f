#include "srlab/domain.hpp"

#include "srlab/quadrature.hpp"
#include "srlab/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace srlab {

Domain::Domain(std::shared_ptr<const Model> model, std::string id) : model_(std::move(model)), id_(std::move(id)) {
  if (!model_) throw DomainError("domain needs a model");
}

double tangential_gradient_norm(const Model& model, const Vec& q, const Vec& grad) {
  if (model.chart() == ChartKind::UnitSphere) {
    Vec y = q.normalized();
    return (grad - grad.dot(y) * y).norm();
  }
  return grad.norm();
}

double horizontal_gradient_norm(const Model& model, const Vec& q, const Vec& grad) {
  Mat G = model.cometric(q);
  return std::sqrt(std::max(0.0, grad.dot(G * grad)));
}

double sigma_factor(const Domain& domain, const Vec& q) {
  const Model& m = domain.model();
  Vec g = domain.level_gradient(q);
  const double t = tangential_gradient_norm(m, q, g);
  if (t == 0.0) return 0.0;
  return m.volume_density(q) * horizontal_gradient_norm(m, q, g) / t;
}

HorizontalNormal horizontal_normal(const Domain& domain, const Vec& q, double eps_char, double boundary_tol) {
  const Model& m = domain.model();
  m.check_chart(q);
  const double U = domain.level(q);
  if (std::abs(U) > boundary_tol) throw PreconditionError("horizontal_normal: point is not on the boundary");
  Vec g = domain.level_gradient(q);
  HorizontalNormal out;
  Mat X = m.horizontal_frame(q);
  Vec xu = X.transpose() * g;
  out.grad_h_norm = xu.norm();
  const double t = tangential_gradient_norm(m, q, g);
  out.characteristic = !(t > 0.0) || out.grad_h_norm < eps_char * t;
  if (out.characteristic) {
    out.vector = Vec::Zero(m.chart_dim());
    out.frame = Vec::Zero(m.k());
    return out;
  }
  out.frame = xu / out.grad_h_norm;
  out.vector = X * out.frame;
  return out;
}

CharacteristicScan characteristic_scan(const Domain& domain, std::size_t n, double eps_char, std::uint64_t seed) {
  struct Row {
    double w, gh;
  };
  const Model& m = domain.model();
  auto rows = map_samples<Row>(n, seed, 11, Execution::Serial, [&](Rng& rng, std::size_t) {
    BoundaryPoint b = domain.sample_boundary(rng);
    Vec g = domain.level_gradient(b.q);
    const double t = tangential_gradient_norm(m, b.q, g);
    const double gh = t > 0.0 ? horizontal_gradient_norm(m, b.q, g) / t : 0.0;
    return Row{b.area_weight * m.volume_density(b.q), gh};
  });
  CharacteristicScan s;
  s.samples = n;
  if (n == 0) return s;
  double wsum = 0.0, wchar = 0.0;
  std::size_t cnt = 0;
  std::vector<double> gh;
  gh.reserve(n);
  for (const auto& r : rows) {
    wsum += r.w;
    if (r.gh < eps_char) {
      wchar += r.w;
      ++cnt;
    }
    gh.push_back(r.gh);
  }
  s.fraction = wsum > 0.0 ? wchar / wsum : 0.0;
  s.count_fraction = static_cast<double>(cnt) / static_cast<double>(n);
  std::sort(gh.begin(), gh.end());
  s.min_grad_h = gh.front();
  s.median_grad_h = gh[gh.size() / 2];
  return s;
}

Estimate boundary_measure_mc(const Domain& domain, std::size_t n, std::uint64_t seed) {
  auto vals = map_samples<double>(n, seed, 12, Execution::Serial, [&](Rng& rng, std::size_t) {
    BoundaryPoint b = domain.sample_boundary(rng);
    return b.area_weight * sigma_factor(domain, b.q);
  });
  return mean_estimate(vals);
}

// ---------------------------------------------------------------------------

HemisphereDomain::HemisphereDomain(std::shared_ptr<const SphereModel> model)
    : Domain(model, "hemisphere"), sphere_(std::move(model)) {
  known.L = kPi;
  known.diam_r = kPi;
  known.omega_volume = 0.5 * sphere_area(sphere_->n());
  known.lambda1 = sphere_->k();
}

Vec HemisphereDomain::level_gradient(const Vec& q) const {
  Vec g = Vec::Zero(q.size());
  g(0) = 1.0;
  return g;
}

Vec HemisphereDomain::sample_interior(Rng& rng) const {
  Vec q = uniform_on_sphere(rng, sphere_->chart_dim());
  q(0) = std::abs(q(0));
  return q;
}

BoundaryPoint HemisphereDomain::sample_boundary(Rng& rng) const {
  const int m = sphere_->chart_dim();
  Vec s = uniform_on_sphere(rng, m - 1);
  BoundaryPoint b;
  b.q = Vec::Zero(m);
  b.q.tail(m - 1) = s;
  b.area_weight = sphere_area(m - 2);
  return b;
}

std::optional<double> HemisphereDomain::volume() const { return 0.5 * sphere_area(sphere_->n()); }

std::optional<double> HemisphereDomain::boundary_measure() const {
  // |grad_H x0|^2 = 1 - sum_a (J_a q)_0^2 on the boundary sphere; each J_a row 0
  // must pick a single distinct coordinate for the radial reduction below.
  const int m = sphere_->chart_dim();
  const int N = m - 1;  // boundary is S^{N-1} in coordinates 1..m-1
  std::vector<int> cols;
  for (const auto& J : sphere_->verticals()) {
    int hit = -1;
    for (int c = 0; c < m; ++c) {
      if (J(0, c) == 0.0) continue;
      if (hit >= 0 || std::abs(std::abs(J(0, c)) - 1.0) > 1e-15) return std::nullopt;
      hit = c;
    }
    if (hit <= 0 || std::find(cols.begin(), cols.end(), hit) != cols.end()) return std::nullopt;
    cols.push_back(hit);
  }
  const int j = static_cast<int>(cols.size());
  if (j == 0) return sphere_area(N - 1);
  if (j >= N) return std::nullopt;
  // int_{S^{N-1}} f(|y|), y in R^j, with |y| = sin(phi)
  const double inner = integrate_gl(
      [&](double phi) {
        const double s = std::sin(phi), c = std::cos(phi);
        return c * std::pow(s, j - 1) * std::pow(c, N - j - 1);
      },
      0.0, kPi / 2, 64);
  return sphere_area(j - 1) * sphere_area(N - j - 1) * inner;
}

// ---------------------------------------------------------------------------

SphereSlabDomain::SphereSlabDomain(std::shared_ptr<const SphereModel> model, double eps)
    : Domain(model, "slab"), eps_(eps), s_(std::sin(eps)) {
  if (!(eps > 0.0 && eps < kPi / 2)) throw DomainError("slab needs 0 < eps < pi/2");
}

double SphereSlabDomain::level(const Vec& q) const { return s_ - std::abs(q(q.size() - 1)); }

Vec SphereSlabDomain::level_gradient(const Vec& q) const {
  Vec g = Vec::Zero(q.size());
  const double z = q(q.size() - 1);
  g(q.size() - 1) = z > 0 ? -1.0 : (z < 0 ? 1.0 : 0.0);
  return g;
}

Vec SphereSlabDomain::sample_interior(Rng& rng) const {
  for (int tries = 0; tries < 100000; ++tries) {
    Vec q = uniform_on_sphere(rng, model_->chart_dim());
    if (level(q) >= 0.0) return q;
  }
  throw SamplingError("slab interior sampler exhausted its retries");
}

BoundaryPoint SphereSlabDomain::sample_boundary(Rng& rng) const {
  const int m = model_->chart_dim();
  Vec w = uniform_on_sphere(rng, m - 1);
  BoundaryPoint b;
  b.q = Vec::Zero(m);
  const double c = std::sqrt(1.0 - s_ * s_);
  b.q.head(m - 1) = c * w;
  b.q(m - 1) = uniform01(rng) < 0.5 ? s_ : -s_;
  b.area_weight = 2.0 * sphere_area(m - 2) * std::pow(c, m - 2);
  return b;
}

std::optional<double> SphereSlabDomain::volume() const {
  const int m = model_->chart_dim();
  return sphere_area(m - 2) *
         integrate_gl([&](double t) { return std::pow(1.0 - t * t, 0.5 * (m - 3)); }, -s_, s_, 64);
}

// ---------------------------------------------------------------------------

BoxDomain::BoxDomain(std::shared_ptr<const Model> model, Vec lo, Vec hi)
    : Domain(model, "box"), lo_(std::move(lo)), hi_(std::move(hi)) {
  const int m = model_->chart_dim();
  if (model_->chart() != ChartKind::Euclidean) throw DomainError("box domains need a Euclidean chart");
  if (lo_.size() != m || hi_.size() != m) throw DomainError("box bounds have the wrong dimension");
  for (int i = 0; i < m; ++i)
    if (!(hi_(i) > lo_(i))) throw DomainError("box bounds must satisfy lo < hi");
  Vec mid = 0.5 * (lo_ + hi_);
  if (std::abs(model_->volume_density(mid) - 1.0) > 1e-14 || std::abs(model_->volume_density(lo_) - 1.0) > 1e-14)
    throw DomainError("box domains need a unit volume density");
  Vec side = hi_ - lo_;
  for (int i = 0; i < m; ++i) {
    double a = 1.0;
    for (int j = 0; j < m; ++j)
      if (j != i) a *= side(j);
    face_area_.push_back(a);
    face_area_.push_back(a);
    total_area_ += 2.0 * a;
  }
}

double BoxDomain::level(const Vec& q) const {
  double u = kInf;
  for (int i = 0; i < q.size(); ++i) u = std::min({u, q(i) - lo_(i), hi_(i) - q(i)});
  return u;
}

Vec BoxDomain::level_gradient(const Vec& q) const {
  double u = kInf;
  int face = 0;
  for (int i = 0; i < q.size(); ++i) {
    if (q(i) - lo_(i) < u) {
      u = q(i) - lo_(i);
      face = 2 * i;
    }
    if (hi_(i) - q(i) < u) {
      u = hi_(i) - q(i);
      face = 2 * i + 1;
    }
  }
  Vec g = Vec::Zero(q.size());
  g(face / 2) = face % 2 == 0 ? 1.0 : -1.0;
  return g;
}

Vec BoxDomain::sample_interior(Rng& rng) const {
  Vec q(lo_.size());
  for (int i = 0; i < q.size(); ++i) q(i) = lo_(i) + (hi_(i) - lo_(i)) * uniform01(rng);
  return q;
}

BoundaryPoint BoxDomain::sample_boundary(Rng& rng) const {
  double t = uniform01(rng) * total_area_;
  int face = 0;
  while (face + 1 < static_cast<int>(face_area_.size()) && t >= face_area_[face]) {
    t -= face_area_[face];
    ++face;
  }
  BoundaryPoint b;
  b.q = sample_interior(rng);
  const int axis = face / 2;
  b.q(axis) = face % 2 == 0 ? lo_(axis) : hi_(axis);
  b.area_weight = total_area_;
  return b;
}

std::optional<double> BoxDomain::volume() const { return (hi_ - lo_).prod(); }

double BoxDomain::length_scale() const { return (hi_ - lo_).norm(); }

// ---------------------------------------------------------------------------

namespace {

// mu(phi) = z / r^2 along the sphere profile, increasing on [0, 2 pi)
double heis_mu(double phi) {
  if (phi < 1e-3) return phi / 12.0 + phi * phi * phi / 360.0;
  return (phi - std::sin(phi)) / (4.0 * (1.0 - std::cos(phi)));
}

double heis_dmu(double phi) {
  if (phi < 1e-3) return 1.0 / 12.0 + phi * phi / 120.0;
  const double c1 = 1.0 - std::cos(phi);
  return (c1 * c1 - (phi - std::sin(phi)) * std::sin(phi)) / (4.0 * c1 * c1);
}

double heis_G(double phi) {
  if (phi < 1e-4) return 1.0 + phi * phi / 24.0;
  return phi / (2.0 * std::sin(0.5 * phi));
}

double heis_dG(double phi) {
  if (phi < 1e-4) return phi / 12.0;
  const double s = std::sin(0.5 * phi);
  return (2.0 * s - phi * std::cos(0.5 * phi)) / (4.0 * s * s);
}

double heis_solve_phi(double s) {
  double lo = 0.0, hi = 2.0 * kPi;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (heis_mu(mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void heis_distance_grad(double r, double z, double& d, double& dd_dr, double& dd_dz) {
  const double az = std::abs(z), sg = z > 0 ? 1.0 : (z < 0 ? -1.0 : 0.0);
  if (r <= 0.0) {
    d = std::sqrt(4.0 * kPi * az);
    dd_dr = 0.0;
    dd_dz = d > 0.0 ? sg * 2.0 * kPi / d : 0.0;
    return;
  }
  const double s = az / (r * r);
  const double phi = heis_solve_phi(s);
  const double G = heis_G(phi), dG = heis_dG(phi), dmu = heis_dmu(phi);
  d = r * G;
  dd_dr = G - 2.0 * s * dG / dmu;
  dd_dz = sg * dG / (r * dmu);
}

}  // namespace

double heisenberg_distance(double r, double z) {
  double d, a, b;
  heis_distance_grad(r, z, d, a, b);
  return d;
}

void heisenberg_sphere_profile(double R, double phi, double& r, double& z, double& dr, double& dz) {
  const double a = std::abs(phi), sg = phi < 0 ? -1.0 : 1.0;
  if (a < 1e-4) {
    r = R * (1.0 - a * a / 24.0);
    z = sg * R * R * (a / 12.0 - a * a * a / 240.0);
    dr = -sg * R * a / 12.0;
    dz = R * R * (1.0 / 12.0 - a * a / 80.0);
    return;
  }
  const double s = std::sin(0.5 * a), c = std::cos(0.5 * a);
  r = 2.0 * R * s / a;
  z = sg * R * R * (a - std::sin(a)) / (2.0 * a * a);
  // derivatives with respect to phi
  dr = sg * R * (a * c - 2.0 * s) / (a * a);
  dz = R * R * ((1.0 - std::cos(a)) * a * a - 2.0 * a * (a - std::sin(a))) / (2.0 * a * a * a * a);
}

HeisenbergBallDomain::HeisenbergBallDomain(std::shared_ptr<const CarnotModel> model, double radius)
    : Domain(model, "cc-ball"), R_(radius) {
  const CarnotSpec& s = model->spec();
  if (s.m2 != 1 || s.k % 2 != 0) throw DomainError("cc-ball needs a heisenberg model");
  d_ = s.k / 2;
  CarnotSpec ref = heisenberg_spec(d_);
  if (ref.c != s.c) throw DomainError("cc-ball needs the standard heisenberg structure constants");
  if (!(radius > 0.0)) throw DomainError("cc-ball radius must be positive");
  double zm = 0.0;
  for (int i = 1; i <= 4096; ++i) {
    double r, z, dr, dz;
    heisenberg_sphere_profile(R_, 2.0 * kPi * i / 4096.0, r, z, dr, dz);
    zm = std::max(zm, z);
  }
  z_max_ = zm * 1.001;
  known.diam_r = 2.0 * R_;
  known.L = 2.0 * R_;
}

double HeisenbergBallDomain::level(const Vec& q) const {
  return R_ - heisenberg_distance(q.head(2 * d_).norm(), q(2 * d_));
}

Vec HeisenbergBallDomain::level_gradient(const Vec& q) const {
  const double r = q.head(2 * d_).norm();
  double d, dr, dz;
  heis_distance_grad(r, q(2 * d_), d, dr, dz);
  Vec g = Vec::Zero(q.size());
  if (r > 0.0) g.head(2 * d_) = -dr * q.head(2 * d_) / r;
  g(2 * d_) = -dz;
  return g;
}

Vec HeisenbergBallDomain::sample_interior(Rng& rng) const {
  for (int tries = 0; tries < 100000; ++tries) {
    Vec q(2 * d_ + 1);
    Vec dir = uniform_on_sphere(rng, 2 * d_);
    q.head(2 * d_) = R_ * std::pow(uniform01(rng), 1.0 / (2 * d_)) * dir;
    q(2 * d_) = z_max_ * (2.0 * uniform01(rng) - 1.0);
    if (level(q) >= 0.0) return q;
  }
  throw SamplingError("cc-ball interior sampler exhausted its retries");
}

BoundaryPoint HeisenbergBallDomain::sample_boundary(Rng& rng) const {
  const double phi = 4.0 * kPi * (uniform01(rng) - 0.5);
  double r, z, dr, dz;
  heisenberg_sphere_profile(R_, phi, r, z, dr, dz);
  Vec dir = uniform_on_sphere(rng, 2 * d_);
  BoundaryPoint b;
  b.q = Vec(2 * d_ + 1);
  b.q.head(2 * d_) = r * dir;
  b.q(2 * d_) = z;
  b.area_weight = 4.0 * kPi * sphere_area(2 * d_ - 1) * std::pow(r, 2 * d_ - 1) * std::hypot(dr, dz);
  return b;
}

std::optional<double> HeisenbergBallDomain::volume() const {
  // region {|z| <= Z(|x|)} revolved: |S^{2d-1}| int r^{2d-1} 2 Z(r) dr, in the
  // profile parameter phi in (0, 2 pi)
  const double v = integrate_gl_composite(
      [&](double phi) {
        double r, z, dr, dz;
        heisenberg_sphere_profile(R_, phi, r, z, dr, dz);
        return std::pow(r, 2 * d_ - 1) * 2.0 * z * (-dr);
      },
      0.0, 2.0 * kPi, 16, 32);
  return sphere_area(2 * d_ - 1) * v;
}

std::optional<double> HeisenbergBallDomain::boundary_measure() const {
  const double half = integrate_gl_composite(
      [&](double phi) {
        double r, z, dr, dz;
        heisenberg_sphere_profile(R_, phi, r, z, dr, dz);
        Vec q = Vec::Zero(2 * d_ + 1);
        q(0) = r;
        q(2 * d_) = z;
        Vec g = level_gradient(q);
        const double t = g.norm();
        const double w = t > 0.0 ? horizontal_gradient_norm(*model_, q, g) / t : 0.0;
        return std::pow(r, 2 * d_ - 1) * std::hypot(dr, dz) * w;
      },
      0.0, 2.0 * kPi, 16, 32);
  return 2.0 * sphere_area(2 * d_ - 1) * half;
}

// ---------------------------------------------------------------------------

BandChartDomain::BandChartDomain(std::shared_ptr<const SphericalBandModel> model)
    : Domain(model, "band"), eps_(model->eps()) {
  known.L = 2.0 * eps_;
  known.diam_r = 2.0 * eps_;
}

double BandChartDomain::level(const Vec& q) const { return eps_ - std::abs(q(0) - kPi / 2); }

Vec BandChartDomain::level_gradient(const Vec& q) const {
  Vec g = Vec::Zero(2);
  const double t = q(0) - kPi / 2;
  g(0) = t > 0 ? -1.0 : (t < 0 ? 1.0 : 0.0);
  return g;
}

Vec BandChartDomain::sample_interior(Rng& rng) const {
  // theta with density sin(theta) on the band
  for (int tries = 0; tries < 100000; ++tries) {
    const double th = kPi / 2 + eps_ * (2.0 * uniform01(rng) - 1.0);
    if (uniform01(rng) <= std::sin(th)) {
      Vec q(2);
      q << th, 2.0 * kPi * uniform01(rng);
      return q;
    }
  }
  throw SamplingError("band interior sampler exhausted its retries");
}

BoundaryPoint BandChartDomain::sample_boundary(Rng& rng) const {
  BoundaryPoint b;
  b.q = Vec(2);
  b.q << (uniform01(rng) < 0.5 ? kPi / 2 - eps_ : kPi / 2 + eps_), 2.0 * kPi * uniform01(rng);
  b.area_weight = 4.0 * kPi;
  return b;
}

std::optional<double> BandChartDomain::volume() const { return 4.0 * kPi * std::sin(eps_); }

std::optional<double> BandChartDomain::boundary_measure() const { return 4.0 * kPi * std::cos(eps_); }

}  // namespace srlab
