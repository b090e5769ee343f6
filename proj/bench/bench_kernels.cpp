// Serial reference vs OpenMP consensus kernels.

#include <benchmark/benchmark.h>

#include <map>

#include "pdslide/graph.hpp"
#include "pdslide/kernels.hpp"
#include "pdslide/linear_operator.hpp"

using namespace pdslide;

namespace {

const CommGraph& graph_for(int m) {
  static std::map<int, CommGraph> cache;
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, erdos_renyi(m, 10.0 / m, 1)).first;
  return it->second;
}

template <kernels::Exec exec>
void BM_Laplacian(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const CommGraph& g = graph_for(m);
  const Vec x = Vec::Random(static_cast<Eigen::Index>(m) * d);
  Vec out(x.size());
  for (auto _ : state) {
    if constexpr (exec == kernels::Exec::serial)
      kernels::laplacian_apply_serial(g, d, {x.data(), static_cast<std::size_t>(x.size())},
                                      {out.data(), static_cast<std::size_t>(out.size())});
    else
      kernels::laplacian_apply_omp(g, d, {x.data(), static_cast<std::size_t>(x.size())},
                                   {out.data(), static_cast<std::size_t>(out.size())});
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(state.iterations() * x.size() * static_cast<std::int64_t>(sizeof(double)));
}

template <kernels::Exec exec>
void BM_IncidenceAdjoint(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const CommGraph& g = graph_for(m);
  const std::vector<std::int8_t> sign(g.edge_count(), 1);
  const Vec z = Vec::Random(static_cast<Eigen::Index>(g.edge_count()) * d);
  Vec out(static_cast<Eigen::Index>(m) * d);
  for (auto _ : state) {
    if constexpr (exec == kernels::Exec::serial)
      kernels::incidence_adjoint_serial(g, sign, d, {z.data(), static_cast<std::size_t>(z.size())},
                                        {out.data(), static_cast<std::size_t>(out.size())});
    else
      kernels::incidence_adjoint_omp(g, sign, d, {z.data(), static_cast<std::size_t>(z.size())},
                                     {out.data(), static_cast<std::size_t>(out.size())});
    benchmark::DoNotOptimize(out.data());
  }
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int m : {100, 1000, 10000})
    for (int d : {1, 16, 128}) b->Args({m, d});
}

}  // namespace

BENCHMARK(BM_Laplacian<kernels::Exec::serial>)->Apply(shapes);
BENCHMARK(BM_Laplacian<kernels::Exec::omp>)->Apply(shapes);
BENCHMARK(BM_IncidenceAdjoint<kernels::Exec::serial>)->Apply(shapes);
BENCHMARK(BM_IncidenceAdjoint<kernels::Exec::omp>)->Apply(shapes);

BENCHMARK_MAIN();
