#pragma once

#include "srlab/types.hpp"

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace srlab {

enum class Execution { Serial, Parallel };

// Samples are processed in fixed-size chunks; chunk c of stream s draws from
// an engine seeded by (seed, s, c), so results do not depend on thread count.
inline constexpr std::size_t kChunkSize = 256;

Rng chunk_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t chunk);

void set_thread_count(int n);
int thread_count();

// out[i] = fn(rng, i) for i < n.
template <class T, class Fn>
std::vector<T> map_samples(std::size_t n, std::uint64_t seed, std::uint64_t stream,
                           Execution exec, Fn&& fn) {
  std::vector<T> out(n);
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  std::vector<std::exception_ptr> errors(chunks);
  auto run_chunk = [&](std::size_t c) {
    try {
      Rng rng = chunk_engine(seed, stream, c);
      const std::size_t end = std::min(n, (c + 1) * kChunkSize);
      for (std::size_t i = c * kChunkSize; i < end; ++i) out[i] = fn(rng, i);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (exec == Execution::Parallel) {
    const long long nc = static_cast<long long>(chunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long c = 0; c < nc; ++c) run_chunk(static_cast<std::size_t>(c));
  } else {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Fixed-order mean and standard error.
Estimate mean_estimate(const std::vector<double>& xs);

// Sample covariance of two equally long series (fixed order).
double sample_covariance(const std::vector<double>& a, const std::vector<double>& b);

// Ratio mean(a)/mean(b) with delta-method standard error (includes covariance).
Estimate ratio_estimate(const std::vector<double>& a, const std::vector<double>& b);

// uniform point on the unit sphere S^{dim-1} of R^dim
Vec uniform_on_sphere(Rng& rng, int dim);
Vec standard_normal(Rng& rng, int dim);
double uniform01(Rng& rng);

}  // namespace srlab
