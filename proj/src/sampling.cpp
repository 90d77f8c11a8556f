#include "srlab/sampling.hpp"

#include <cmath>

namespace srlab {

double sphere_area(int d) {
  if (d < 0) throw DomainError("sphere_area: negative dimension");
  const double h = 0.5 * (d + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

Rng chunk_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return Rng(seq);
}

void set_thread_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Estimate mean_estimate(const std::vector<double>& xs) {
  Estimate e;
  const std::size_t n = xs.size();
  if (n == 0) return e;
  double s = 0.0;
  for (double x : xs) s += x;
  const double mean = s / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  e.value = mean;
  e.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return e;
}

double sample_covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n < 2 || b.size() != n) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(n - 1);
}

Estimate ratio_estimate(const std::vector<double>& a, const std::vector<double>& b) {
  Estimate ea = mean_estimate(a), eb = mean_estimate(b);
  Estimate r;
  r.value = ea.value / eb.value;
  const double n = static_cast<double>(a.size());
  const double va = sample_covariance(a, a), vb = sample_covariance(b, b), cab = sample_covariance(a, b);
  const double rel2 = (va / (ea.value * ea.value) + vb / (eb.value * eb.value) -
                       2.0 * cab / (ea.value * eb.value)) / n;
  r.std_error = std::abs(r.value) * std::sqrt(std::max(rel2, 0.0));
  return r;
}

Vec standard_normal(Rng& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = g(rng);
  return v;
}

Vec uniform_on_sphere(Rng& rng, int dim) {
  for (;;) {
    Vec v = standard_normal(rng, dim);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace srlab
