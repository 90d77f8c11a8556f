#include "srlab/carnot.hpp"

#include "srlab/inequalities.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace srlab {

namespace {

constexpr std::uint64_t kStreamDiameter = 31;
constexpr std::uint64_t kStreamSigma = 32;

void check_dims(const CarnotSpec& spec, const Vec& a, const char* who) {
  if (a.size() != spec.dim()) throw DomainError(std::string(who) + ": dimension mismatch");
}

}  // namespace

CarnotSpec parse_carnot_spec(std::istream& is) {
  CarnotSpec s;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  std::vector<char> set;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    ls.clear();
    ls.seekg(0);
    auto fail = [&](const std::string& what) {
      throw ConfigError("carnot spec line " + std::to_string(lineno) + ": " + what);
    };
    if (!have_header) {
      if (!(ls >> s.k >> s.m2) || s.k < 1 || s.m2 < 0 || s.k + s.m2 > kMaxChart) fail("expected header `k m2`");
      std::string extra;
      if (ls >> extra) fail("trailing tokens in header");
      s.c.assign(s.k * s.k * s.m2, 0.0);
      set.assign(s.c.size(), 0);
      have_header = true;
      continue;
    }
    int i, j, l;
    double v;
    if (!(ls >> i >> j >> l >> v)) fail("expected `i j l value`");
    std::string extra;
    if (ls >> extra) fail("trailing tokens");
    if (i < 1 || i > s.k || j < 1 || j > s.k || l < 1 || l > s.m2) fail("index out of range");
    if (i == j && v != 0.0) fail("diagonal constants must vanish");
    --i, --j, --l;
    const auto a = static_cast<std::size_t>((i * s.k + j) * s.m2 + l);
    const auto b = static_cast<std::size_t>((j * s.k + i) * s.m2 + l);
    if ((set[a] && s.c[a] != v) || (set[b] && s.c[b] != -v)) fail("conflicts with an earlier entry");
    s.c[a] = v;
    s.c[b] = -v;
    set[a] = set[b] = 1;
  }
  if (!have_header) throw ConfigError("carnot spec: missing header `k m2`");
  return s;
}

CarnotSpec parse_carnot_spec_string(const std::string& text) {
  std::istringstream is(text);
  return parse_carnot_spec(is);
}

void write_carnot_spec(std::ostream& os, const CarnotSpec& spec) {
  os.precision(17);
  os << spec.k << ' ' << spec.m2 << '\n';
  for (int i = 0; i < spec.k; ++i)
    for (int j = i + 1; j < spec.k; ++j)
      for (int l = 0; l < spec.m2; ++l)
        if (spec.at(i, j, l) != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << l + 1 << ' ' << spec.at(i, j, l) << '\n';
}

void validate_carnot_spec(const CarnotSpec& spec) {
  if (spec.k < 1 || spec.m2 < 0 || static_cast<int>(spec.c.size()) != spec.k * spec.k * spec.m2)
    throw DomainError("carnot spec: bad dimensions");
  for (int i = 0; i < spec.k; ++i)
    for (int j = 0; j < spec.k; ++j)
      for (int l = 0; l < spec.m2; ++l)
        if (spec.at(i, j, l) != -spec.at(j, i, l)) throw DomainError("carnot spec: constants are not skew");
}

bool is_bracket_generating(const CarnotSpec& spec) {
  validate_carnot_spec(spec);
  if (spec.m2 == 0) return true;
  const int pairs = spec.k * (spec.k - 1) / 2;
  if (pairs == 0) return false;
  Eigen::MatrixXd M(pairs, spec.m2);
  int row = 0;
  for (int i = 0; i < spec.k; ++i)
    for (int j = i + 1; j < spec.k; ++j, ++row)
      for (int l = 0; l < spec.m2; ++l) M(row, l) = spec.at(i, j, l);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(1e-12);
  return qr.rank() == spec.m2;
}

Vec group_multiply(const CarnotSpec& spec, const Vec& a, const Vec& b) {
  check_dims(spec, a, "group_multiply");
  check_dims(spec, b, "group_multiply");
  Vec out = a + b;
  for (int l = 0; l < spec.m2; ++l) {
    double f = 0.0;
    for (int i = 0; i < spec.k; ++i)
      for (int j = 0; j < spec.k; ++j) f += a(i) * spec.at(i, j, l) * b(j);
    out(spec.k + l) += 0.5 * f;
  }
  return out;
}

Vec group_inverse(const CarnotSpec& spec, const Vec& a) {
  check_dims(spec, a, "group_inverse");
  return -a;
}

Vec reduced_geodesic(const CarnotSpec& spec, const Vec& q, const Vec& u, double t) {
  if (u.size() != spec.k) throw DomainError("reduced_geodesic: u has wrong size");
  if (std::abs(u.norm() - 1.0) > 1e-12) throw PreconditionError("reduced_geodesic: |u| must be 1");
  Vec step = Vec::Zero(spec.dim());
  step.head(spec.k) = t * u;
  return group_multiply(spec, q, step);
}

Chord line_chord(const CarnotSpec& spec, const LevelFunction& U, const Vec& q, const Vec& u, double scale) {
  if (U(q) < 0.0) throw DomainError("line_chord: base point outside the domain");
  const double h = scale / 256.0;
  const double t_cap = 8.0 * scale;
  Chord c;
  auto exit_time = [&](double sign) {
    auto val = [&](double t) { return U(reduced_geodesic(spec, q, u, sign * t)); };
    double a = 0.0;
    while (a < t_cap) {
      const double b = a + h;
      if (val(b) < 0.0) {
        double lo = a, hi = b;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (val(mid) >= 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
      a = b;
    }
    c.capped = true;
    return kInf;
  };
  c.forward = exit_time(1.0);
  c.backward = exit_time(-1.0);
  return c;
}

Chord line_chord(const CarnotSpec& spec, const Domain& domain, const Vec& q, const Vec& u) {
  return line_chord(spec, [&](const Vec& p) { return domain.level(p); }, q, u, domain.length_scale());
}

HorizontalDiameter horizontal_diameter(const CarnotSpec& spec, const Domain& domain, std::size_t n_samples,
                                       std::uint64_t seed, int iterations, Execution exec) {
  if (n_samples == 0) throw PreconditionError("horizontal_diameter: need samples");
  struct Cand {
    double len = 0.0;
    Vec q, u;
  };
  auto cands = map_samples<Cand>(n_samples, seed, kStreamDiameter, exec, [&](Rng& rng, std::size_t) {
    Cand c;
    c.q = domain.sample_interior(rng);
    c.u = uniform_on_sphere(rng, spec.k);
    const Chord ch = line_chord(spec, domain, c.q, c.u);
    c.len = ch.capped ? kInf : ch.length();
    return c;
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (cands[i].len > cands[best].len) best = i;
  HorizontalDiameter out;
  out.samples = n_samples;
  out.sampled = cands[best].len;
  Vec q = cands[best].q, u = cands[best].u;
  double len = out.sampled;
  double tail_start = len, step_final = 0.0;
  if (std::isfinite(len)) {
    // coordinate pattern search over (q, u)
    double step = 0.05 * domain.length_scale();
    const int nq = spec.dim(), nu = spec.k;
    auto eval = [&](const Vec& qq, const Vec& uu) {
      if (domain.level(qq) < 0.0) return -1.0;
      const Chord ch = line_chord(spec, domain, qq, uu);
      return ch.capped ? kInf : ch.length();
    };
    for (int it = 0; it < iterations; ++it) {
      if (it == iterations - iterations / 4) tail_start = len;
      bool improved = false;
      for (int c = 0; c < nq + nu; ++c) {
        for (double s : {step, -step}) {
          Vec qq = q, uu = u;
          if (c < nq) {
            qq(c) += s;
          } else {
            uu(c - nq) += s / domain.length_scale();
            uu.normalize();
          }
          const double v = eval(qq, uu);
          if (v > len) {
            len = v;
            q = qq;
            u = uu;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
      out.iterations = it + 1;
    }
    step_final = step;
  }
  out.lower = len;
  // still-moving tail plus the final mesh size
  out.upper = len + (len - tail_start) + step_final;
  out.q_best = q;
  out.u_best = u;
  return out;
}

CarnotBounds carnot_bounds(const CarnotSpec& spec, const Domain& domain, std::size_t n_samples,
                           std::size_t n_boundary, std::uint64_t seed, Execution exec) {
  CarnotBounds b;
  b.k = spec.k;
  b.diameter = horizontal_diameter(spec, domain, n_samples, seed, 200, exec);
  const double D = b.diameter.upper;
  b.lambda1_bound = std::isfinite(D) ? spec.k * kPi * kPi / (D * D) : 0.0;
  b.perimeter_bound = std::isfinite(D) ? isoperimetric_constant(spec.k) / D : 0.0;
  auto vol = domain.volume();
  if (!vol) throw PreconditionError("carnot_bounds: domain has no volume");
  const Estimate sigma = boundary_measure_mc(domain, n_boundary, seed ^ kStreamSigma);
  b.sigma_over_omega = {sigma.value / *vol, sigma.std_error / *vol};
  b.perimeter_holds = b.sigma_over_omega.value + 3.0 * b.sigma_over_omega.std_error >= b.perimeter_bound;
  if (domain.known.diam_r)
    b.lambda1_analytic_bound = spec.k * kPi * kPi / (*domain.known.diam_r * *domain.known.diam_r);
  return b;
}

}  // namespace srlab
