#include <benchmark/benchmark.h>

#include "lak/experiment.hpp"
#include "lak/sentiment.hpp"

namespace {

void BM_ScoreDocuments(benchmark::State& state) {
  const auto lexicon = lak::sentiment::Lexicon::load(std::filesystem::path(LAK_BENCH_DATA_DIR) / "lexicon" /
                                                     "education.tsv");
  const auto cohort = lak::experiment::generate({.response_rate = 1.0});
  for (auto _ : state) {
    for (const auto& doc : cohort.feedback) benchmark::DoNotOptimize(lak::sentiment::score_document(doc, lexicon));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cohort.feedback.size()));
}
BENCHMARK(BM_ScoreDocuments)->Unit(benchmark::kMicrosecond);

}  // namespace
