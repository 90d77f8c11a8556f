#include "srlab/spectral.hpp"

#include <cmath>
#include <ostream>

namespace srlab {

namespace {

// angular mode eigenvalue multiplying tan^2 r
double mode_potential(SpectralCase c) {
  switch (c) {
    case SpectralCase::Sphere: return 0.0;
    case SpectralCase::Chf: return 1.0;
    case SpectralCase::Qhf: return 3.0;
  }
  return 0.0;
}

double weight(SpectralCase c, int d, double r) {
  const double s = std::sin(r), co = std::cos(r);
  switch (c) {
    case SpectralCase::Sphere: return std::pow(s, d - 1);
    case SpectralCase::Chf: return std::pow(s, 2 * d - 1) * co;
    case SpectralCase::Qhf: return std::pow(s, 4 * d - 1) * co * co * co;
  }
  return 0.0;
}

struct Tridiag {
  std::vector<double> diag, off;  // off[i] couples i and i + 1
};

// symmetric form W^{-1/2} A W^{-1/2} of the finite-volume pencil
Tridiag assemble(SpectralCase c, int d, int n, std::vector<double>& r, std::vector<double>& w) {
  const double a = 0.5 * kPi, h = a / n;
  const double V = mode_potential(c);
  r.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    r[i] = (i + 0.5) * h;
    w[i] = weight(c, d, r[i]);
  }
  Tridiag t;
  t.diag.assign(n, 0.0);
  t.off.assign(n > 0 ? n - 1 : 0, 0.0);
  for (int i = 0; i < n; ++i) {
    const double tn = std::tan(r[i]);
    t.diag[i] = V * tn * tn * w[i] * h * h;
  }
  // interior faces; the face at r = 0 carries no flux
  for (int i = 0; i + 1 < n; ++i) {
    const double wf = weight(c, d, (i + 1) * h);
    t.diag[i] += wf;
    t.diag[i + 1] += wf;
    t.off[i] = -wf;
  }
  // Dirichlet at r = pi/2, half a cell away
  t.diag[n - 1] += 2.0 * weight(c, d, a);
  for (int i = 0; i < n; ++i) t.diag[i] /= h * h * w[i];
  for (int i = 0; i + 1 < n; ++i) t.off[i] /= h * h * std::sqrt(w[i] * w[i + 1]);
  return t;
}

// solves (T - shift) x = b in place (Thomas)
void thomas(const Tridiag& t, double shift, std::vector<double>& b) {
  const std::size_t n = b.size();
  std::vector<double> cp(n), dp(n);
  double den = t.diag[0] - shift;
  if (den == 0.0) throw NumericError("radial solve: singular pivot");
  cp[0] = n > 1 ? t.off[0] / den : 0.0;
  dp[0] = b[0] / den;
  for (std::size_t i = 1; i < n; ++i) {
    den = t.diag[i] - shift - t.off[i - 1] * cp[i - 1];
    if (den == 0.0) throw NumericError("radial solve: singular pivot");
    cp[i] = i + 1 < n ? t.off[i] / den : 0.0;
    dp[i] = (b[i] - t.off[i - 1] * dp[i - 1]) / den;
  }
  b[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) b[i] = dp[i] - cp[i] * b[i + 1];
}

double rayleigh(const Tridiag& t, const std::vector<double>& y) {
  double num = 0.0, den = 0.0;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    double ay = t.diag[i] * y[i];
    if (i > 0) ay += t.off[i - 1] * y[i - 1];
    if (i + 1 < n) ay += t.off[i] * y[i + 1];
    num += y[i] * ay;
    den += y[i] * y[i];
  }
  return num / den;
}

}  // namespace

SpectralCase parse_spectral_case(const std::string& s) {
  if (s == "sphere") return SpectralCase::Sphere;
  if (s == "chf") return SpectralCase::Chf;
  if (s == "qhf") return SpectralCase::Qhf;
  throw ConfigError("unknown spectral case '" + s + "' (sphere, chf, qhf)");
}

const char* to_string(SpectralCase c) {
  switch (c) {
    case SpectralCase::Sphere: return "sphere";
    case SpectralCase::Chf: return "chf";
    case SpectralCase::Qhf: return "qhf";
  }
  return "?";
}

int spectral_rank(SpectralCase c, int d) {
  if (d < 1) throw PreconditionError("spectral: d must be positive");
  switch (c) {
    case SpectralCase::Sphere: return d;
    case SpectralCase::Chf: return 2 * d;
    case SpectralCase::Qhf: return 4 * d;
  }
  return d;
}

double cylindrical_residual(SpectralCase c, int d, const std::vector<std::array<double, 2>>& points) {
  const int k = spectral_rank(c, d);
  double worst = 0.0;
  for (const auto& pt : points) {
    const double ang = pt[0], r = pt[1];
    if (!(r > 0.0 && r < 0.5 * kPi) || std::abs(r) < 1e-12 || std::abs(r - 0.5 * kPi) < 1e-12)
      throw DomainError("cylindrical_residual: grid touches a singular ring in r");
    double res = 0.0;
    const double cr = std::cos(r), sr = std::sin(r), tr = std::tan(r), ct = cr / sr;
    switch (c) {
      case SpectralCase::Sphere: {
        // Phi = cos r, radial Laplace-Beltrami
        res = -cr + (d - 1) * ct * (-sr) + k * cr;
        break;
      }
      case SpectralCase::Chf: {
        const double ca = std::cos(ang);
        const double phi = ca * cr, phi_r = -ca * sr, phi_rr = -ca * cr, phi_tt = -ca * cr;
        res = phi_rr + ((2 * d - 1) * ct - tr) * phi_r + tr * tr * phi_tt + k * phi;
        break;
      }
      case SpectralCase::Qhf: {
        if (!(ang > 0.0 && ang < kPi) || ang < 1e-12 || kPi - ang < 1e-12)
          throw DomainError("cylindrical_residual: grid touches a singular ring in eta");
        const double ce = std::cos(ang), se = std::sin(ang);
        const double phi = ce * cr, phi_r = -ce * sr, phi_rr = -ce * cr;
        const double ang_part = (-ce + 2.0 * (ce / se) * (-se)) * cr;
        res = phi_rr + ((4 * d - 1) * ct - 3.0 * tr) * phi_r + tr * tr * ang_part + k * phi;
        break;
      }
    }
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double cylindrical_residual(SpectralCase c, int d, int n) {
  if (n < 1) throw PreconditionError("cylindrical_residual: n must be positive");
  std::vector<std::array<double, 2>> pts;
  const double lo = c == SpectralCase::Qhf ? 0.0 : -0.5 * kPi;
  const double span = kPi;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      pts.push_back({lo + (i + 0.5) * span / n, (j + 0.5) * 0.5 * kPi / n});
  return cylindrical_residual(c, d, pts);
}

double radial_eigenvalue(SpectralCase c, int d, int n, std::vector<double>* r_out, std::vector<double>* g_out,
                         double* rayleigh_analytic) {
  if (n < 4) throw PreconditionError("radial_eigenvalue: need at least 4 cells");
  spectral_rank(c, d);
  std::vector<double> r, w;
  Tridiag t = assemble(c, d, n, r, w);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = std::cos(r[i]) * std::sqrt(w[i]);
  if (rayleigh_analytic) *rayleigh_analytic = rayleigh(t, y);
  double lam = rayleigh(t, y), prev = kInf;
  // the operator is positive definite: inverse iteration without shift
  double change = kInf;
  for (int it = 0; it < 200; ++it) {
    thomas(t, 0.0, y);
    double nrm = 0.0;
    for (double v : y) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : y) v /= nrm;
    lam = rayleigh(t, y);
    change = std::abs(lam - prev);
    if (change <= 1e-14 * std::abs(lam)) break;
    prev = lam;
  }
  // roundoff can stall the last digits
  if (change > 1e-11 * std::abs(lam)) throw NumericError("radial_eigenvalue: inverse iteration did not converge");
  if (r_out && g_out) {
    *r_out = r;
    g_out->resize(n);
    for (int i = 0; i < n; ++i) (*g_out)[i] = y[i] / std::sqrt(w[i]);
    const double g0 = (*g_out)[0];
    for (double& v : *g_out) v /= g0;
  }
  return lam;
}

SpectralResult separated_eigensolve(SpectralCase c, int d, int finest) {
  if (finest < 16 || finest % 4 != 0) throw PreconditionError("separated_eigensolve: finest grid must be a multiple of 4, >= 16");
  SpectralResult res;
  res.kase = c;
  res.d = d;
  res.analytic = spectral_rank(c, d);
  for (int n : {finest / 4, finest / 2, finest}) {
    double ra = 0.0;
    const bool last = n == finest;
    res.lambda.push_back(radial_eigenvalue(c, d, n, last ? &res.r : nullptr, last ? &res.g : nullptr, &ra));
    res.grids.push_back(n);
    res.rayleigh_analytic.push_back(ra);
  }
  // second-order scheme: eliminate h^2 then h^4
  const double r1 = (4.0 * res.lambda[1] - res.lambda[0]) / 3.0;
  const double r2 = (4.0 * res.lambda[2] - res.lambda[1]) / 3.0;
  res.extrapolated = (16.0 * r2 - r1) / 15.0;
  res.extrapolation_error = std::abs(res.extrapolated - r2);
  res.residual = cylindrical_residual(c, d);
  return res;
}

IntervalEigen interval_dirichlet_eigenvalue(const std::function<double(double)>& wfun, double a, double b,
                                            int finest) {
  if (!(b > a) || finest < 16 || finest % 4 != 0)
    throw PreconditionError("interval_dirichlet_eigenvalue: need b > a and a finest grid multiple of 4");
  IntervalEigen out;
  for (int n : {finest / 4, finest / 2, finest}) {
    const double h = (b - a) / n;
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
      w[i] = wfun(a + (i + 0.5) * h);
      if (!(w[i] > 0.0)) throw DomainError("interval_dirichlet_eigenvalue: weight must be positive inside");
    }
    Tridiag t;
    t.diag.assign(n, 0.0);
    t.off.assign(n - 1, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
      const double wf = wfun(a + (i + 1) * h);
      t.diag[i] += wf;
      t.diag[i + 1] += wf;
      t.off[i] = -wf;
    }
    t.diag[0] += 2.0 * wfun(a);
    t.diag[n - 1] += 2.0 * wfun(b);
    for (int i = 0; i < n; ++i) t.diag[i] /= h * h * w[i];
    for (int i = 0; i + 1 < n; ++i) t.off[i] /= h * h * std::sqrt(w[i] * w[i + 1]);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = std::sin(kPi * (i + 0.5) / n) * std::sqrt(w[i]);
    double lam = rayleigh(t, y), prev = kInf, change = kInf;
    for (int it = 0; it < 200; ++it) {
      thomas(t, 0.0, y);
      double nrm = 0.0;
      for (double v : y) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (double& v : y) v /= nrm;
      lam = rayleigh(t, y);
      change = std::abs(lam - prev);
      if (change <= 1e-14 * std::abs(lam)) break;
      prev = lam;
    }
    if (change > 1e-11 * std::abs(lam)) throw NumericError("interval_dirichlet_eigenvalue: no convergence");
    out.grids.push_back(n);
    out.lambda.push_back(lam);
  }
  const double r1 = (4.0 * out.lambda[1] - out.lambda[0]) / 3.0;
  const double r2 = (4.0 * out.lambda[2] - out.lambda[1]) / 3.0;
  out.extrapolated = (16.0 * r2 - r1) / 15.0;
  out.extrapolation_error = std::abs(out.extrapolated - r2);
  return out;
}

IntervalEigen band_eigenvalue(double eps, int finest) {
  if (!(eps > 0.0 && eps < 0.5 * kPi)) throw PreconditionError("band_eigenvalue: eps must lie in (0, pi/2)");
  return interval_dirichlet_eigenvalue([](double th) { return std::sin(th); }, 0.5 * kPi - eps, 0.5 * kPi + eps,
                                       finest);
}

void write_convergence_csv(std::ostream& os, const SpectralResult& res) {
  os.precision(17);
  os << "nodes,lambda1\n";
  for (std::size_t i = 0; i < res.grids.size(); ++i) os << res.grids[i] << ',' << res.lambda[i] << '\n';
  os << "inf," << res.extrapolated << '\n';
}

}  // namespace srlab
