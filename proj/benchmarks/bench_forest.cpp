#include <benchmark/benchmark.h>

#include "lak/experiment.hpp"
#include "lak/forest.hpp"

namespace {

std::vector<lak::catalog::LabeledRow> cohort_rows() {
  const auto cohort = lak::experiment::generate({.effect_delta = 8});
  const auto spec = lak::catalog::FeatureSpec::model1(cohort.marks);
  std::vector<lak::catalog::LabeledRow> rows;
  for (const auto& r : cohort.marks) rows.push_back(lak::catalog::encode_features(r, std::nullopt, spec));
  return rows;
}

void BM_TrainForest(benchmark::State& state) {
  const auto rows = cohort_rows();
  lak::forest::ForestConfig config;
  config.num_trees = static_cast<std::size_t>(state.range(0));
  config.categorical_features_info = {{9, 2}};
  for (auto _ : state) benchmark::DoNotOptimize(lak::forest::train(rows, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainForest)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PredictForest(benchmark::State& state) {
  const auto rows = cohort_rows();
  lak::forest::ForestConfig config;
  config.categorical_features_info = {{9, 2}};
  const auto model = lak::forest::train(rows, config);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(rows));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows.size()));
}
BENCHMARK(BM_PredictForest)->Unit(benchmark::kMicrosecond);

}  // namespace
