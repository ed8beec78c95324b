#include <benchmark/benchmark.h>

#include "soatk/fincat.hpp"
#include "soatk/fplin.hpp"

namespace {

soatk::fincat::SetDiagram arrow_fixture(std::size_t n) {
  using soatk::fincat::Elem;
  soatk::fincat::SetDiagram d;
  d.base = soatk::fincat::walking_arrow();
  for (std::size_t i = 0; i < n; ++i) {
    d.value["a"].push_back(Elem{"a", "x" + std::to_string(i)});
    d.value["b"].push_back(Elem{"b", "y" + std::to_string(i / 2)});
  }
  std::sort(d.value["b"].begin(), d.value["b"].end());
  d.value["b"].erase(std::unique(d.value["b"].begin(), d.value["b"].end()), d.value["b"].end());
  auto& fn = d.action["a_to_b"];
  for (std::size_t i = 0; i < n; ++i)
    fn[Elem{"a", "x" + std::to_string(i)}] = Elem{"b", "y" + std::to_string(i / 2)};
  return d;
}

void BM_ColimSet(benchmark::State& state) {
  auto d = arrow_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto col = soatk::fincat::colim_set(d);
    benchmark::DoNotOptimize(col.apex.size());
  }
}
BENCHMARK(BM_ColimSet)->Arg(16)->Arg(64)->Arg(256);

void BM_FpRank(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  soatk::fp::Mat m(n, n, 2);
  std::uint64_t s = 42;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      s = s * 6364136223846793005ull + 1442695040888963407ull;
      m.set(i, j, static_cast<unsigned>((s >> 60) & 1));
    }
  for (auto _ : state) benchmark::DoNotOptimize(m.rank());
}
BENCHMARK(BM_FpRank)->Arg(16)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
