#include <benchmark/benchmark.h>

#include "lak/dataflow.hpp"

namespace {

using DS = lak::dataflow::PartitionedDataset<std::string, double>;

std::vector<std::pair<std::string, double>> records(std::size_t n) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back("s" + std::to_string(i % 5000), static_cast<double>(i % 5));
  return out;
}

void BM_AggregateByKey(benchmark::State& state) {
  const auto ds = DS::from_records(records(200000), static_cast<std::size_t>(state.range(0)));
  const lak::Executor exec(static_cast<std::size_t>(state.range(1)));
  using Acc = std::pair<std::size_t, double>;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lak::dataflow::aggregate_by_key(
        ds, Acc{0, 0.0}, [](Acc& a, double v) { ++a.first, a.second += v; },
        [](Acc& a, const Acc& b) { a.first += b.first, a.second += b.second; }, exec));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.size()));
}
BENCHMARK(BM_AggregateByKey)->Args({1, 1})->Args({8, 1})->Args({8, 4})->Unit(benchmark::kMillisecond);

void BM_JoinByKey(benchmark::State& state) {
  const auto left = DS::from_records(records(5000), 8);
  auto few = records(5000);
  few.resize(1260);
  const auto right = DS::from_records(few, 8);
  for (auto _ : state) benchmark::DoNotOptimize(lak::dataflow::join_by_key(left, right));
}
BENCHMARK(BM_JoinByKey)->Unit(benchmark::kMicrosecond);

}  // namespace
