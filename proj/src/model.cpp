#include "srlab/model.hpp"

#include "srlab/sampling.hpp"

#include <cmath>
#include <sstream>

namespace srlab {

BracketTensors::BracketTensors(int k_, int r_)
    : k(k_),
      r(r_),
      b(k_ * k_ * k_, 0.0),
      c(k_ * k_ * r_, 0.0),
      a(k_ * r_ * k_, 0.0),
      d(k_ * r_ * r_, 0.0),
      e(r_ * r_ * r_, 0.0) {}

Model::Model(std::string id, int n, int k, int chart_dim, ChartKind chart)
    : id_(std::move(id)), n_(n), k_(k), m_(chart_dim), chart_(chart) {
  if (n < 1 || k < 1 || k > n) throw DomainError("model " + id_ + ": need 1 <= k <= n");
  if (chart_dim > kMaxChart)
    throw DomainError("model " + id_ + ": chart dimension " + std::to_string(chart_dim) +
                      " exceeds the supported maximum " + std::to_string(kMaxChart));
}

Mat Model::cometric(const Vec& q) const {
  Mat X = horizontal_frame(q);
  return X * X.transpose();
}

BracketTensors Model::bracket_tensors(const Vec& q) const {
  check_chart(q);
  return finite_difference_brackets(*this, q);
}

double Model::volume_density(const Vec&) const { return 1.0; }

void Model::hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const {
  Mat X = horizontal_frame(x);
  Vec u = X.transpose() * p;
  dh_dp = X * u;
  dh_dx.setZero(m_);
  const double h = 1e-6 * (x.norm() + 1.0);
  for (int c = 0; c < m_; ++c) {
    Vec xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    Vec up = horizontal_frame_near(xp, x).transpose() * p;
    Vec um = horizontal_frame_near(xm, x).transpose() * p;
    dh_dx(c) = u.dot((up - um) / (2.0 * h));
  }
}

double Model::cut_length(const FrameCovector&) const {
  throw PreconditionError("model " + id_ + " has no cut hook");
}

void Model::check_chart(const Vec& q) const {
  if (q.size() != m_) {
    std::ostringstream os;
    os << "model " << id_ << ": point has " << q.size() << " coordinates, expected " << m_;
    throw DomainError(os.str());
  }
  if (!q.allFinite()) throw DomainError("model " + id_ + ": non-finite point");
}

void Model::normalize_state(Vec&, Vec&) const {}

Mat Model::full_frame(const Vec& q) const {
  Mat X = horizontal_frame(q);
  Mat Z = vertical_frame(q);
  Mat F(m_, m_);
  F.leftCols(k_) = X;
  F.middleCols(k_, n_ - k_) = Z;
  if (m_ > n_) {
    // only sphere charts have a normal direction
    F.col(n_) = q.normalized();
  }
  return F;
}

Vec Model::covector(const FrameCovector& lambda) const {
  check_chart(lambda.q);
  if (lambda.u.size() != k_ || lambda.v.size() != n_ - k_)
    throw DomainError("model " + id_ + ": covector component sizes do not match (k, n-k)");
  Mat F = full_frame(lambda.q);
  Vec rhs = Vec::Zero(m_);
  rhs.head(k_) = lambda.u;
  rhs.segment(k_, n_ - k_) = lambda.v;
  Vec p = F.transpose().partialPivLu().solve(rhs);
  return p;
}

FrameCovector Model::frame_coords(const Vec& x, const Vec& p) const {
  FrameCovector out;
  out.q = x;
  out.u = horizontal_frame(x).transpose() * p;
  out.v = vertical_frame(x).transpose() * p;
  return out;
}

double hamiltonian(const Model& model, const FrameCovector& lambda) {
  model.check_chart(lambda.q);
  if (lambda.u.size() != model.k()) throw DomainError("hamiltonian: u has wrong size");
  return 0.5 * lambda.u.squaredNorm();
}

namespace {

// columns: X_0..X_{k-1}, Z_0..Z_{r-1}
Mat all_fields(const Model& model, const Vec& q, const Vec& anchor) {
  const int k = model.k(), r = model.r();
  Mat F(model.chart_dim(), k + r);
  F.leftCols(k) = model.horizontal_frame_near(q, anchor);
  if (r > 0) F.rightCols(r) = model.vertical_frame(q);
  return F;
}

void fill_from_expansion(BracketTensors& bt, int fa, int fb, const Vec& coef, int k, int r) {
  // coef: coefficients on X_0..X_{k-1}, Z_0..Z_{r-1}
  if (fa < k && fb < k) {
    for (int l = 0; l < k; ++l) bt.B(fa, fb, l) = coef(l);
    for (int l = 0; l < r; ++l) bt.C(fa, fb, l) = coef(k + l);
  } else if (fa < k && fb >= k) {
    for (int l = 0; l < k; ++l) bt.A(fa, fb - k, l) = coef(l);
    for (int l = 0; l < r; ++l) bt.D(fa, fb - k, l) = coef(k + l);
  } else if (fa >= k && fb >= k) {
    for (int l = 0; l < r; ++l) bt.E(fa - k, fb - k, l) = coef(k + l);
  }
}

}  // namespace

BracketTensors finite_difference_brackets(const Model& model, const Vec& q) {
  const int k = model.k(), r = model.r(), n = model.n();
  const double h = 1e-5 * (q.norm() + 1.0);
  Mat F0 = all_fields(model, q, q);
  // directional derivative of every field along every field
  std::vector<Mat> DF(n);
  for (int a = 0; a < n; ++a) {
    Vec w = F0.col(a);
    Vec qp = q + h * w, qm = q - h * w;
    DF[a] = (all_fields(model, qp, q) - all_fields(model, qm, q)) / (2.0 * h);
  }
  Mat frame = model.full_frame(q);
  auto lu = frame.partialPivLu();
  BracketTensors bt(k, r);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      Vec br = DF[a].col(b) - DF[b].col(a);
      Vec coef = lu.solve(br);
      fill_from_expansion(bt, a, b, coef, k, r);
      fill_from_expansion(bt, b, a, -coef, k, r);
    }
  }
  // [Z_j, X_i] is stored through a_ij via antisymmetry; fill_from_expansion with
  // (fa >= k, fb < k) is a no-op, so the (a, b) with a < b ordering covers a and d.
  return bt;
}

// ---------------------------------------------------------------------------

SphereModel::SphereModel(std::string id, int n, std::vector<Mat> verticals)
    : Model(std::move(id), n, n - static_cast<int>(verticals.size()), n + 1, ChartKind::UnitSphere),
      J_(std::move(verticals)) {
  for (const auto& J : J_) {
    if (J.rows() != m_ || J.cols() != m_) throw DomainError("sphere model: vertical generator has wrong size");
  }
}

void SphereModel::set_linear_frame(std::vector<Mat> generators) {
  if (static_cast<int>(generators.size()) != k_) throw DomainError("linear frame needs k generators");
  linear_frame_ = std::move(generators);
}

namespace {

Mat sphere_projector(const Vec& y, const std::vector<Mat>& J) {
  const int m = static_cast<int>(y.size());
  Mat P = Mat::Identity(m, m) - y * y.transpose();
  for (const auto& Ja : J) {
    Vec z = Ja * y;
    P -= z * z.transpose();
  }
  return P;
}

}  // namespace

Mat SphereModel::horizontal_frame_near(const Vec& q, const Vec& anchor) const {
  if (!linear_frame_.empty()) {
    Mat X(m_, k_);
    for (int i = 0; i < k_; ++i) X.col(i) = linear_frame_[i] * q;
    return X;
  }
  Vec ya = anchor.normalized();
  Mat Pa = sphere_projector(ya, J_);
  Eigen::ColPivHouseholderQR<Mat> qr(Pa);
  const auto& perm = qr.colsPermutation().indices();
  Vec y = q.normalized();
  Mat P = sphere_projector(y, J_);
  Mat X(m_, k_);
  for (int i = 0; i < k_; ++i) {
    Vec w = P.col(perm(i));
    for (int j = 0; j < i; ++j) w -= X.col(j).dot(w) * X.col(j);
    for (int j = 0; j < i; ++j) w -= X.col(j).dot(w) * X.col(j);
    X.col(i) = w.normalized();
  }
  return X;
}

Mat SphereModel::vertical_frame(const Vec& q) const {
  Mat Z(m_, r());
  for (int a = 0; a < r(); ++a) Z.col(a) = J_[a] * q;
  return Z;
}

Mat SphereModel::cometric(const Vec& q) const { return sphere_projector(q.normalized(), J_); }

BracketTensors SphereModel::bracket_tensors(const Vec& q) const {
  check_chart(q);
  const int k = k_, r = this->r();
  BracketTensors bt(k, r);
  Mat X = horizontal_frame(q);
  Mat Z = vertical_frame(q);
  if (!linear_frame_.empty()) {
    std::vector<Mat> G(linear_frame_);
    G.insert(G.end(), J_.begin(), J_.end());
    Mat F = full_frame(q);
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) {
        Vec br = (G[b] * G[a] - G[a] * G[b]) * q;
        Vec coef = F.transpose() * br;
        fill_from_expansion(bt, a, b, coef, k, r);
        fill_from_expansion(bt, b, a, -coef, k, r);
      }
    }
    return bt;
  }
  // c, d, e in closed form; a, b need derivatives of the local horizontal frame
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < r; ++l) bt.C(i, j, l) = 2.0 * X.col(i).dot(J_[l] * X.col(j));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < r; ++j)
      for (int l = 0; l < r; ++l)
        bt.D(i, j, l) = X.col(i).dot((J_[l] * J_[j] - J_[j] * J_[l]) * q);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int l = 0; l < r; ++l)
        bt.E(i, j, l) = ((J_[j] * J_[i] - J_[i] * J_[j]) * q).dot(Z.col(l));
  const double h = 1e-5 * (q.norm() + 1.0);
  auto deriv = [&](const Vec& w) -> Mat {
    return (horizontal_frame_near(q + h * w, q) - horizontal_frame_near(q - h * w, q)) / (2.0 * h);
  };
  std::vector<Mat> DX(k), DZ(r);
  for (int i = 0; i < k; ++i) DX[i] = deriv(X.col(i));
  for (int j = 0; j < r; ++j) DZ[j] = deriv(Z.col(j));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      Vec br = DX[i].col(j) - DX[j].col(i);
      for (int l = 0; l < k; ++l) bt.B(i, j, l) = br.dot(X.col(l));
    }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < r; ++j) {
      Vec br = J_[j] * X.col(i) - DZ[j].col(i);
      for (int l = 0; l < k; ++l) bt.A(i, j, l) = br.dot(X.col(l));
    }
  return bt;
}

void SphereModel::hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const {
  const double xp = x.dot(p);
  dh_dp = p - xp * x;
  dh_dx = -xp * p;
  for (const auto& Ja : J_) {
    Vec z = Ja * x;
    const double va = p.dot(z);
    dh_dp -= va * z;
    dh_dx.noalias() -= va * (Ja.transpose() * p);
  }
}

double SphereModel::cut_length(const FrameCovector& lambda) const {
  if (lambda.v.size() > 0 && lambda.v.cwiseAbs().maxCoeff() > 1e-8)
    throw PreconditionError("cut hook is defined for reduced covectors only");
  return kPi;
}

void SphereModel::check_chart(const Vec& q) const {
  Model::check_chart(q);
  if (std::abs(q.norm() - 1.0) > 1e-8) throw DomainError("model " + id_ + ": point is not on the unit sphere");
}

Vec SphereModel::sample_point(Rng& rng) const { return uniform_on_sphere(rng, m_); }

void SphereModel::normalize_state(Vec& x, Vec& p) const {
  x /= x.norm();
  p -= x.dot(p) * x;
}

Mat quaternion_left(int unit) {
  Mat L = Mat::Zero(4, 4);
  switch (unit) {
    case 1:  // i
      L(0, 1) = -1; L(1, 0) = 1; L(2, 3) = -1; L(3, 2) = 1;
      break;
    case 2:  // j
      L(0, 2) = -1; L(1, 3) = 1; L(2, 0) = 1; L(3, 1) = -1;
      break;
    case 3:  // k
      L(0, 3) = -1; L(1, 2) = -1; L(2, 1) = 1; L(3, 0) = 1;
      break;
    default:
      throw DomainError("quaternion unit must be 1, 2 or 3");
  }
  return L;
}

std::shared_ptr<SphereModel> make_round_sphere(int d) {
  if (d < 1) throw DomainError("round-sphere(d) needs d >= 1");
  return std::make_shared<SphereModel>("round-sphere(" + std::to_string(d) + ")", d, std::vector<Mat>{});
}

std::shared_ptr<SphereModel> make_chf(int d) {
  if (d < 1) throw DomainError("chf(d) needs d >= 1");
  const int m = 2 * d + 2;
  if (m > kMaxChart) throw DomainError("chf(d) supports d <= " + std::to_string(kMaxChart / 2 - 1));
  Mat J = Mat::Zero(m, m);
  for (int b = 0; b < d + 1; ++b) {
    J(2 * b, 2 * b + 1) = -1.0;
    J(2 * b + 1, 2 * b) = 1.0;
  }
  auto model = std::make_shared<SphereModel>("chf(" + std::to_string(d) + ")", 2 * d + 1, std::vector<Mat>{J});
  if (d == 1) model->set_linear_frame({quaternion_left(2), quaternion_left(3)});
  return model;
}

std::shared_ptr<SphereModel> make_qhf(int d) {
  if (d < 1) throw DomainError("qhf(d) needs d >= 1");
  const int m = 4 * d + 4;
  if (m > kMaxChart) throw DomainError("qhf(d) supports d <= " + std::to_string(kMaxChart / 4 - 1));
  std::vector<Mat> J;
  for (int unit = 1; unit <= 3; ++unit) {
    Mat L = Mat::Zero(m, m);
    Mat Q = quaternion_left(unit);
    for (int b = 0; b < d + 1; ++b) L.block(4 * b, 4 * b, 4, 4) = Q;
    J.push_back(L);
  }
  return std::make_shared<SphereModel>("qhf(" + std::to_string(d) + ")", 4 * d + 3, std::move(J));
}

// ---------------------------------------------------------------------------

CarnotModel::CarnotModel(std::string id, CarnotSpec spec)
    : Model(std::move(id), spec.k + spec.m2, spec.k, spec.k + spec.m2, ChartKind::Euclidean),
      spec_(std::move(spec)) {
  if (static_cast<int>(spec_.c.size()) != spec_.k * spec_.k * spec_.m2)
    throw DomainError("carnot spec: structure constant table has wrong size");
}

Mat CarnotModel::horizontal_frame_near(const Vec& q, const Vec&) const {
  const int k = spec_.k, m2 = spec_.m2;
  Mat X = Mat::Zero(m_, k);
  for (int i = 0; i < k; ++i) {
    X(i, i) = 1.0;
    for (int l = 0; l < m2; ++l) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) s += q(j) * spec_.at(j, i, l);
      X(k + l, i) = 0.5 * s;
    }
  }
  return X;
}

Mat CarnotModel::vertical_frame(const Vec&) const {
  Mat Z = Mat::Zero(m_, spec_.m2);
  for (int l = 0; l < spec_.m2; ++l) Z(spec_.k + l, l) = 1.0;
  return Z;
}

BracketTensors CarnotModel::bracket_tensors(const Vec& q) const {
  check_chart(q);
  BracketTensors bt(spec_.k, spec_.m2);
  bt.c = spec_.c;
  return bt;
}

void CarnotModel::hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const {
  const int k = spec_.k, m2 = spec_.m2;
  Vec u = p.head(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < m2; ++l) u(i) += 0.5 * x(j) * spec_.at(j, i, l) * p(k + l);
  dh_dp.setZero(m_);
  dh_dx.setZero(m_);
  dh_dp.head(k) = u;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < m2; ++l) {
        const double cji = spec_.at(j, i, l);
        if (cji == 0.0) continue;
        dh_dp(k + l) += 0.5 * u(i) * x(j) * cji;
        dh_dx(j) += 0.5 * u(i) * cji * p(k + l);
      }
}

double CarnotModel::cut_length(const FrameCovector& lambda) const {
  if (lambda.v.size() > 0 && lambda.v.cwiseAbs().maxCoeff() > 1e-8)
    throw PreconditionError("cut hook is defined for reduced covectors only");
  return kInf;
}

Vec CarnotModel::sample_point(Rng& rng) const { return standard_normal(rng, m_); }

CarnotSpec heisenberg_spec(int d) {
  if (d < 1) throw DomainError("heisenberg(d) needs d >= 1");
  CarnotSpec s;
  s.k = 2 * d;
  s.m2 = 1;
  s.c.assign(s.k * s.k, 0.0);
  for (int i = 0; i < d; ++i) {
    s.at(i, i + d, 0) = 1.0;
    s.at(i + d, i, 0) = -1.0;
  }
  return s;
}

std::shared_ptr<CarnotModel> make_heisenberg(int d) {
  return std::make_shared<CarnotModel>("heisenberg(" + std::to_string(d) + ")", heisenberg_spec(d));
}

// ---------------------------------------------------------------------------

MartinetModel::MartinetModel() : Model("martinet", 3, 2, 3, ChartKind::Euclidean) {}

Mat MartinetModel::horizontal_frame_near(const Vec& q, const Vec&) const {
  Mat X = Mat::Zero(3, 2);
  X(0, 0) = 1.0;
  X(1, 1) = 1.0;
  X(2, 1) = 0.5 * q(0) * q(0);
  return X;
}

Mat MartinetModel::vertical_frame(const Vec&) const {
  Mat Z = Mat::Zero(3, 1);
  Z(2, 0) = 1.0;
  return Z;
}

BracketTensors MartinetModel::bracket_tensors(const Vec& q) const {
  check_chart(q);
  BracketTensors bt(2, 1);
  bt.C(0, 1, 0) = q(0);
  bt.C(1, 0, 0) = -q(0);
  return bt;
}

void MartinetModel::hamiltonian_gradient(const Vec& x, const Vec& p, Vec& dh_dx, Vec& dh_dp) const {
  const double u1 = p(0);
  const double u2 = p(1) + 0.5 * x(0) * x(0) * p(2);
  dh_dp.resize(3);
  dh_dp << u1, u2, 0.5 * x(0) * x(0) * u2;
  dh_dx.resize(3);
  dh_dx << u2 * x(0) * p(2), 0.0, 0.0;
}

Vec MartinetModel::sample_point(Rng& rng) const { return standard_normal(rng, 3); }

// ---------------------------------------------------------------------------

SphericalBandModel::SphericalBandModel(double eps)
    : Model("spherical-band", 2, 1, 2, ChartKind::Euclidean), eps_(eps) {
  if (!(eps > 0.0 && eps < kPi / 2)) throw DomainError("spherical-band needs 0 < eps < pi/2");
  std::ostringstream os;
  os << "spherical-band(" << eps << ")";
  id_ = os.str();
}

Mat SphericalBandModel::horizontal_frame_near(const Vec&, const Vec&) const {
  Mat X = Mat::Zero(2, 1);
  X(0, 0) = 1.0;
  return X;
}

Mat SphericalBandModel::vertical_frame(const Vec& q) const {
  Mat Z = Mat::Zero(2, 1);
  Z(1, 0) = 1.0 / std::sin(q(0));
  return Z;
}

BracketTensors SphericalBandModel::bracket_tensors(const Vec& q) const {
  check_chart(q);
  BracketTensors bt(1, 1);
  bt.D(0, 0, 0) = -std::cos(q(0)) / std::sin(q(0));
  return bt;
}

double SphericalBandModel::volume_density(const Vec& q) const { return std::sin(q(0)); }

void SphericalBandModel::hamiltonian_gradient(const Vec&, const Vec& p, Vec& dh_dx, Vec& dh_dp) const {
  dh_dp.resize(2);
  dh_dp << p(0), 0.0;
  dh_dx = Vec::Zero(2);
}

void SphericalBandModel::check_chart(const Vec& q) const {
  Model::check_chart(q);
  if (!(q(0) > 0.0 && q(0) < kPi)) throw DomainError("spherical-band: theta outside (0, pi)");
}

Vec SphericalBandModel::sample_point(Rng& rng) const {
  Vec q(2);
  q << 0.3 + (kPi - 0.6) * uniform01(rng), 2.0 * kPi * uniform01(rng);
  return q;
}

// ---------------------------------------------------------------------------

RotatedVerticalModel::RotatedVerticalModel(std::shared_ptr<const Model> base, double twist)
    : Model(base->id() + "+rotated-vertical", base->n(), base->k(), base->chart_dim(), base->chart()),
      base_(std::move(base)),
      twist_(twist) {}

Mat RotatedVerticalModel::horizontal_frame_near(const Vec& q, const Vec& anchor) const {
  return base_->horizontal_frame_near(q, anchor);
}

Mat RotatedVerticalModel::vertical_frame(const Vec& q) const {
  Mat Z = base_->vertical_frame(q);
  const int r = this->r();
  if (r < 2) return Z;
  // rotation in the (0, 1) plane, then in the (r-2, r-1) plane
  auto rotate = [&](int a, int b, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Vec za = Z.col(a), zb = Z.col(b);
    Z.col(a) = c * za + s * zb;
    Z.col(b) = -s * za + c * zb;
  };
  rotate(0, 1, twist_ * q(0) + 0.3);
  rotate(r - 2, r - 1, twist_ * q(q.size() - 1) * q(0) - 0.2);
  return Z;
}

}  // namespace srlab
