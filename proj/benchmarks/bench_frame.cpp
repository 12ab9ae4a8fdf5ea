#include <benchmark/benchmark.h>

#include <unistd.h>

#include "lak/frame.hpp"
#include "lak/random.hpp"

namespace {

lak::storage::ColumnTable wide_table(std::size_t rows) {
  lak::SplitMix64 rng(1);
  lak::storage::ColumnTable t;
  std::vector<std::string> ids(rows);
  for (std::size_t i = 0; i < rows; ++i) ids[i] = "s" + std::to_string(i);
  t.columns.push_back({"student_id", ids, {}});
  for (int c = 0; c < 10; ++c) {
    std::vector<double> v(rows);
    for (auto& x : v) x = rng.uniform01();
    t.columns.push_back({"c" + std::to_string(c), v, {}});
  }
  return t;
}

std::filesystem::path bench_path() {
  return std::filesystem::temp_directory_path() / ("lak-bench-" + std::to_string(::getpid()) + ".laf");
}

void BM_WriteFrame(benchmark::State& state) {
  const auto t = wide_table(static_cast<std::size_t>(state.range(0)));
  const auto path = bench_path();
  for (auto _ : state) lak::storage::write_frame(t, path);
  std::filesystem::remove(path);
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(lak::storage::encode_frame(t).size()));
}
BENCHMARK(BM_WriteFrame)->Arg(500)->Arg(50000)->Unit(benchmark::kMicrosecond);

void BM_ReadFrame(benchmark::State& state) {
  const auto path = bench_path();
  lak::storage::write_frame(wide_table(50000), path);
  std::optional<std::vector<std::string>> projection;
  if (state.range(0) == 1) projection = std::vector<std::string>{"student_id", "c3"};
  for (auto _ : state) benchmark::DoNotOptimize(lak::storage::read_frame(path, projection));
  std::filesystem::remove(path);
}
BENCHMARK(BM_ReadFrame)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace
