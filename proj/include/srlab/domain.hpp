#pragma once

#include "srlab/model.hpp"

#include <memory>
#include <optional>
#include <string>

namespace srlab {

struct KnownAnswers {
  std::optional<double> L;
  std::optional<double> diam_r;
  std::optional<double> lambda1;
  std::optional<double> sigma_boundary;
  std::optional<double> omega_volume;
};

// E[area_weight * g(q)] = integral of g over the boundary against the
// Euclidean (sphere charts: Riemannian) hypersurface area of the chart.
struct BoundaryPoint {
  Vec q;
  double area_weight = 0.0;
};

// Compact domain M = {U >= 0} inside a model's chart.
class Domain {
 public:
  explicit Domain(std::shared_ptr<const Model> model, std::string id);
  virtual ~Domain() = default;

  const Model& model() const { return *model_; }
  std::shared_ptr<const Model> model_ptr() const { return model_; }
  const std::string& id() const { return id_; }

  virtual double level(const Vec& q) const = 0;
  // chart gradient of the level function
  virtual Vec level_gradient(const Vec& q) const = 0;
  // q distributed as omega restricted to M, normalized
  virtual Vec sample_interior(Rng& rng) const = 0;
  virtual BoundaryPoint sample_boundary(Rng& rng) const = 0;
  // deterministic omega(M) and sigma(boundary) where a quadrature exists
  virtual std::optional<double> volume() const { return std::nullopt; }
  virtual std::optional<double> boundary_measure() const { return std::nullopt; }
  // rough diameter; t_max defaults to 8 times this
  virtual double length_scale() const = 0;

  KnownAnswers known;

 protected:
  std::shared_ptr<const Model> model_;
  std::string id_;
};

// |grad U| restricted to the chart manifold (sphere charts drop the normal part)
double tangential_gradient_norm(const Model& model, const Vec& q, const Vec& grad);
// |grad_H U| = sqrt(grad^T G grad)
double horizontal_gradient_norm(const Model& model, const Vec& q, const Vec& grad);
// sigma density relative to the area element of BoundaryPoint
double sigma_factor(const Domain& domain, const Vec& q);

struct HorizontalNormal {
  Vec vector;             // chart components, inward
  Vec frame;              // components in the horizontal frame at q (unit)
  double grad_h_norm = 0.0;
  bool characteristic = false;
};

inline constexpr double kBoundaryTol = 1e-10;
inline constexpr double kCharEpsExact = 1e-8;
inline constexpr double kCharEpsSampled = 1e-6;

HorizontalNormal horizontal_normal(const Domain& domain, const Vec& q, double eps_char = kCharEpsExact,
                                   double boundary_tol = 1e-8);

struct CharacteristicScan {
  double fraction = 0.0;  // sigma-weighted when weights are available
  double count_fraction = 0.0;
  double min_grad_h = 0.0;
  double median_grad_h = 0.0;
  std::size_t samples = 0;
};

CharacteristicScan characteristic_scan(const Domain& domain, std::size_t n, double eps_char,
                                       std::uint64_t seed);

// MC estimates of omega(M) (needs a bounding box sampler in the domain) and
// sigma(dM) through the boundary sampler.
Estimate boundary_measure_mc(const Domain& domain, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------

// {q0 >= 0} on a sphere model.
class HemisphereDomain : public Domain {
 public:
  explicit HemisphereDomain(std::shared_ptr<const SphereModel> model);
  double level(const Vec& q) const override { return q(0); }
  Vec level_gradient(const Vec& q) const override;
  Vec sample_interior(Rng& rng) const override;
  BoundaryPoint sample_boundary(Rng& rng) const override;
  std::optional<double> volume() const override;
  std::optional<double> boundary_measure() const override;
  double length_scale() const override { return kPi; }

 private:
  std::shared_ptr<const SphereModel> sphere_;
};

// {|<q, e_last>| <= sin(eps)} on a sphere model: a band around a great sphere.
class SphereSlabDomain : public Domain {
 public:
  SphereSlabDomain(std::shared_ptr<const SphereModel> model, double eps);
  double level(const Vec& q) const override;
  Vec level_gradient(const Vec& q) const override;
  Vec sample_interior(Rng& rng) const override;
  BoundaryPoint sample_boundary(Rng& rng) const override;
  std::optional<double> volume() const override;
  double length_scale() const override { return kPi; }

 private:
  double eps_;
  double s_;
};

// Axis-aligned box in a Euclidean chart with unit volume density.
class BoxDomain : public Domain {
 public:
  BoxDomain(std::shared_ptr<const Model> model, Vec lo, Vec hi);
  double level(const Vec& q) const override;
  Vec level_gradient(const Vec& q) const override;
  Vec sample_interior(Rng& rng) const override;
  BoundaryPoint sample_boundary(Rng& rng) const override;
  std::optional<double> volume() const override;
  double length_scale() const override;
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

 private:
  Vec lo_, hi_;
  std::vector<double> face_area_;
  double total_area_ = 0.0;
};

// Carnot-Caratheodory ball of radius R centred at the identity of heisenberg(d).
class HeisenbergBallDomain : public Domain {
 public:
  HeisenbergBallDomain(std::shared_ptr<const CarnotModel> model, double radius);
  double radius() const { return R_; }
  double level(const Vec& q) const override;
  Vec level_gradient(const Vec& q) const override;
  Vec sample_interior(Rng& rng) const override;
  BoundaryPoint sample_boundary(Rng& rng) const override;
  std::optional<double> volume() const override;
  std::optional<double> boundary_measure() const override;
  double length_scale() const override { return 2.0 * R_; }

 private:
  int d_;
  double R_;
  double z_max_;
};

// CC distance from the identity in heisenberg(d) as a function of (|x|, z).
double heisenberg_distance(double r, double z);
// profile of the unit-speed sphere of radius R: (|x|, z) at parameter phi in (-2 pi, 2 pi)
void heisenberg_sphere_profile(double R, double phi, double& r, double& z, double& dr, double& dz);

// {|theta - pi/2| <= eps} in the chart of the spherical-band model.
class BandChartDomain : public Domain {
 public:
  explicit BandChartDomain(std::shared_ptr<const SphericalBandModel> model);
  double level(const Vec& q) const override;
  Vec level_gradient(const Vec& q) const override;
  Vec sample_interior(Rng& rng) const override;
  BoundaryPoint sample_boundary(Rng& rng) const override;
  std::optional<double> volume() const override;
  std::optional<double> boundary_measure() const override;
  double length_scale() const override { return 2.0 * eps_; }

 private:
  double eps_;
};

}  // namespace srlab
