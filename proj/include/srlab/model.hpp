#pragma once

#include "srlab/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace srlab {

enum class ChartKind {
  Euclidean,   // coordinates on an open subset of R^n
  UnitSphere,  // points of the unit sphere in R^{n+1}
};

// Frame expansion of all pairwise brackets at a point:
//   [X_i, X_j] = b_ij^l X_l + c_ij^l Z_l
//   [X_i, Z_j] = a_ij^l X_l + d_ij^l Z_l
//   [Z_i, Z_j] = e_ij^l Z_l
struct BracketTensors {
  int k = 0;
  int r = 0;
  std::vector<double> b, c, a, d, e;

  BracketTensors() = default;
  BracketTensors(int k_, int r_);

  double& B(int i, int j, int l) { return b[(i * k + j) * k + l]; }
  double& C(int i, int j, int l) { return c[(i * k + j) * r + l]; }
  double& A(int i, int j, int l) { return a[(i * r + j) * k + l]; }
  double& D(int i, int j, int l) { return d[(i * r + j) * r + l]; }
  double& E(int i, int j, int l) { return e[(i * r + j) * r + l]; }
  double B(int i, int j, int l) const { return b[(i * k + j) * k + l]; }
  double C(int i, int j, int l) const { return c[(i * k + j) * r + l]; }
  double A(int i, int j, int l) const { return a[(i * r + j) * k + l]; }
  double D(int i, int j, int l) const { return d[(i * r + j) * r + l]; }
  double E(int i, int j, int l) const { return e[(i * r + j) * r + l]; }
};

class Model {
 public:
  Model(std::string id, int n, int k, int chart_dim, ChartKind chart);
  virtual ~Model() = default;

  const std::string& id() const { return id_; }
  int n() const { return n_; }
  int k() const { return k_; }
  int r() const { return n_ - k_; }
  int chart_dim() const { return m_; }
  ChartKind chart() const { return chart_; }

  // Orthonormal horizontal frame (chart_dim x k). Models without a global
  // frame pick a local one; `anchor` fixes that choice so the frame is smooth
  // in q near anchor.
  virtual Mat horizontal_frame_near(const Vec& q, const Vec& anchor) const = 0;
  Mat horizontal_frame(const Vec& q) const { return horizontal_frame_near(q, q); }
  // chart_dim x (n - k)
  virtual Mat vertical_frame(const Vec& q) const = 0;
  // sum_i X_i X_i^T, frame independent
  virtual Mat cometric(const Vec& q) const;
  // analytic where available, finite differences otherwise
  virtual BracketTensors bracket_tensors(const Vec& q) const;
  // density of omega: w.r.t. Lebesgue measure for Euclidean charts, w.r.t. the
  // round measure for sphere charts
  virtual double volume_density(const Vec& q) const;

  // dH/dp and dH/dx for H(x, p) = 1/2 sum <p, X_i(x)>^2
  virtual void hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const;

  virtual bool has_cut_hook() const { return false; }
  // cut length of a reduced covector; only meaningful when has_cut_hook()
  virtual double cut_length(const FrameCovector& lambda) const;
  // true when the frames are global and smooth (frame-coordinate ODE applies)
  virtual bool has_global_frame() const { return false; }

  virtual void check_chart(const Vec& q) const;
  // point of the chart used for model-level certificates
  virtual Vec sample_point(Rng& rng) const = 0;
  virtual double length_scale() const { return 1.0; }
  // projection back onto the chart manifold after an integration step
  virtual void normalize_state(Vec& x, Vec& p) const;

  // [X Z N] where N spans the normal directions of the chart (sphere: q)
  Mat full_frame(const Vec& q) const;
  Vec covector(const FrameCovector& lambda) const;
  FrameCovector frame_coords(const Vec& x, const Vec& p) const;

 protected:
  std::string id_;
  int n_;
  int k_;
  int m_;
  ChartKind chart_;
};

double hamiltonian(const Model& model, const FrameCovector& lambda);

// Finite-difference brackets from directional derivatives of the frames
// (central differences, step 1e-5 (|q| + 1)).
BracketTensors finite_difference_brackets(const Model& model, const Vec& q);

// ---------------------------------------------------------------------------
// Sphere models: round sphere and Hopf fibrations, ambient coordinates.

class SphereModel : public Model {
 public:
  // verticals: skew orthogonal ambient matrices J_a, vertical field Z_a = J_a q.
  SphereModel(std::string id, int n, std::vector<Mat> verticals);

  Mat horizontal_frame_near(const Vec& q, const Vec& anchor) const override;
  Mat vertical_frame(const Vec& q) const override;
  Mat cometric(const Vec& q) const override;
  BracketTensors bracket_tensors(const Vec& q) const override;
  void hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const override;
  bool has_cut_hook() const override { return true; }
  double cut_length(const FrameCovector& lambda) const override;
  void check_chart(const Vec& q) const override;
  Vec sample_point(Rng& rng) const override;
  double length_scale() const override { return kPi; }
  void normalize_state(Vec& x, Vec& p) const override;
  bool has_global_frame() const override { return !linear_frame_.empty(); }

  const std::vector<Mat>& verticals() const { return J_; }
  // Use X_i = A_i q as a global horizontal frame (e.g. S^3 with quaternions).
  void set_linear_frame(std::vector<Mat> generators);

 private:
  std::vector<Mat> J_;
  std::vector<Mat> linear_frame_;
};

std::shared_ptr<SphereModel> make_round_sphere(int d);
std::shared_ptr<SphereModel> make_chf(int d);
std::shared_ptr<SphereModel> make_qhf(int d);

// left multiplication by i, j, k on R^4 = H, coordinates (a, b, c, d) of a+bi+cj+dk
Mat quaternion_left(int unit);

// ---------------------------------------------------------------------------
// Step-2 Carnot groups in exponential coordinates (x, z) in R^k x R^m2.

struct CarnotSpec {
  int k = 0;
  int m2 = 0;
  std::vector<double> c;  // c[(i * k + j) * m2 + l], skew in (i, j)

  double at(int i, int j, int l) const { return c[(i * k + j) * m2 + l]; }
  double& at(int i, int j, int l) { return c[(i * k + j) * m2 + l]; }
  int dim() const { return k + m2; }
};

class CarnotModel : public Model {
 public:
  CarnotModel(std::string id, CarnotSpec spec);

  const CarnotSpec& spec() const { return spec_; }
  Mat horizontal_frame_near(const Vec& q, const Vec& anchor) const override;
  Mat vertical_frame(const Vec& q) const override;
  BracketTensors bracket_tensors(const Vec& q) const override;
  void hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const override;
  // reduced geodesics are left-translated lines, minimizing for all time
  bool has_cut_hook() const override { return true; }
  double cut_length(const FrameCovector& lambda) const override;
  bool has_global_frame() const override { return true; }
  Vec sample_point(Rng& rng) const override;

 private:
  CarnotSpec spec_;
};

CarnotSpec heisenberg_spec(int d);
std::shared_ptr<CarnotModel> make_heisenberg(int d);

// X1 = d/dx, X2 = d/dy + x^2/2 d/dz, Z = d/dz
class MartinetModel : public Model {
 public:
  MartinetModel();
  Mat horizontal_frame_near(const Vec& q, const Vec& anchor) const override;
  Mat vertical_frame(const Vec& q) const override;
  BracketTensors bracket_tensors(const Vec& q) const override;
  void hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const override;
  bool has_global_frame() const override { return true; }
  Vec sample_point(Rng& rng) const override;
};

// Round S^2 in the chart (theta, phi), D = span{d/dtheta}, Z = (1/sin theta) d/dphi.
// Not bracket generating.
class SphericalBandModel : public Model {
 public:
  explicit SphericalBandModel(double eps);
  double eps() const { return eps_; }
  Mat horizontal_frame_near(const Vec& q, const Vec& anchor) const override;
  Mat vertical_frame(const Vec& q) const override;
  BracketTensors bracket_tensors(const Vec& q) const override;
  double volume_density(const Vec& q) const override;
  void hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const override;
  bool has_global_frame() const override { return true; }
  void check_chart(const Vec& q) const override;
  Vec sample_point(Rng& rng) const override;
  double length_scale() const override { return 2.0 * eps_; }

 private:
  double eps_;
};

// Same sub-Riemannian structure with the vertical frame rotated by a
// q-dependent orthogonal matrix; brackets by finite differences.
class RotatedVerticalModel : public Model {
 public:
  explicit RotatedVerticalModel(std::shared_ptr<const Model> base, double twist = 1.7);
  Mat horizontal_frame_near(const Vec& q, const Vec& anchor) const override;
  Mat vertical_frame(const Vec& q) const override;
  double volume_density(const Vec& q) const override { return base_->volume_density(q); }
  void check_chart(const Vec& q) const override { base_->check_chart(q); }
  Vec sample_point(Rng& rng) const override { return base_->sample_point(rng); }
  double length_scale() const override { return base_->length_scale(); }
  void normalize_state(Vec& x, Vec& p) const override { base_->normalize_state(x, p); }

 private:
  std::shared_ptr<const Model> base_;
  double twist_;
};

}  // namespace srlab
