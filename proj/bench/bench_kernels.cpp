#include "srlab/functions.hpp"
#include "srlab/inequalities.hpp"
#include "srlab/santalo.hpp"

#include <benchmark/benchmark.h>

using namespace srlab;

namespace {

Execution exec_of(const benchmark::State& st) { return st.range(0) ? Execution::Parallel : Execution::Serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "openmp" : "serial"); }

void BM_SantaloRhs(benchmark::State& st) {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  SantaloOptions o;
  o.n = static_cast<std::size_t>(st.range(1));
  o.exec = exec_of(st);
  const std::vector<CovectorFunction> F{constant_function(1.0)};
  for (auto _ : st) benchmark::DoNotOptimize(estimate_rhs(dom, F, o));
  st.SetItemsProcessed(st.iterations() * st.range(1));
  label(st);
}

void BM_SantaloLhs(benchmark::State& st) {
  auto h = make_heisenberg(1);
  HeisenbergBallDomain dom(h, 1.0);
  SantaloOptions o;
  o.n = static_cast<std::size_t>(st.range(1));
  o.exec = exec_of(st);
  const std::vector<CovectorFunction> F{constant_function(1.0)};
  for (auto _ : st) benchmark::DoNotOptimize(estimate_lhs(dom, F, o));
  st.SetItemsProcessed(st.iterations() * st.range(1));
  label(st);
}

void BM_Hardy(benchmark::State& st) {
  auto chf = make_chf(1);
  HemisphereDomain dom(chf);
  HardyOptions o;
  o.n = static_cast<std::size_t>(st.range(1));
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(hardy_check(dom, cos_delta(), 2.0, o));
  st.SetItemsProcessed(st.iterations() * st.range(1));
  label(st);
}

void BM_Lambda1(benchmark::State& st) {
  auto q = make_qhf(1);
  HemisphereDomain dom(q);
  for (auto _ : st)
    benchmark::DoNotOptimize(lambda1_lower_bound(dom, static_cast<std::size_t>(st.range(1)), 1, {}, 0.0, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * st.range(1));
  label(st);
}

}  // namespace

BENCHMARK(BM_SantaloRhs)->ArgsProduct({{0, 1}, {4096}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SantaloLhs)->ArgsProduct({{0, 1}, {4096}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Hardy)->ArgsProduct({{0, 1}, {4096}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lambda1)->ArgsProduct({{0, 1}, {1024}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
