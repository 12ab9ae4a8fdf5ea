// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances and time limits are fixed here.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lak/error.hpp"
#include "lak/evalx.hpp"
#include "lak/experiment.hpp"
#include "lak/forest.hpp"
#include "lak/frame.hpp"
#include "lak/ingest.hpp"
#include "lak/random.hpp"
#include "lak/sentiment.hpp"
#include "lak/sizing.hpp"

namespace {

namespace fs = std::filesystem;
using namespace lak;

constexpr double kMetricTolerance = 1e-12;
constexpr double kForestMinR2 = 0.95;
constexpr double kProjectionMaxFraction = 0.30;
constexpr double kMinImprovement = 0.05;
constexpr std::size_t kMinPositiveSeeds = 4;
constexpr double kNullBand = 0.02;

constexpr double kLimitBanding = 1.0;
constexpr double kLimitForest = 30.0;
constexpr double kLimitExperiment = 120.0;

const fs::path kData = LAK_ACCEPTANCE_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

fs::path scratch(const std::string& tag) {
  const auto p = fs::temp_directory_path() / ("lak-acceptance-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = slurp(e.path());
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const sentiment::Lexicon& lexicon() {
  static const auto lex = sentiment::Lexicon::load(kData / "lexicon" / "education.tsv");
  return lex;
}

// 1 ---------------------------------------------------------------------------
Outcome banding() {
  Outcome o;
  using sentiment::Category;
  const std::vector<std::pair<double, Category>> cases{
      {1, Category::Negative},    {2, Category::Neutral},     {2.5, Category::Neutral},
      {3, Category::Positive},    {4, Category::Positive},    {1.99, Category::Negative},
      {2.0, Category::Neutral},   {2.99, Category::Neutral},  {3.0, Category::Positive}};
  for (const auto& [score, expected] : cases) {
    const auto got = sentiment::band(score);
    o.require(got == expected, fmt(score) + " -> " + std::string(sentiment::to_string(got)));
  }
  if (o.pass) o.detail = std::to_string(cases.size()) + " cases";
  return o;
}

// 2 ---------------------------------------------------------------------------
Outcome metrics() {
  Outcome o;
  const std::vector<double> y{1, 2, 3, 4}, yh{1.5, 2, 2.5, 4};
  const auto r = evalx::regression_metrics(y, yh);
  o.require(std::abs(r.mse - 0.125) <= kMetricTolerance, "MSE " + fmt(r.mse));
  o.require(std::abs(r.mae - 0.25) <= kMetricTolerance, "MAE " + fmt(r.mae));
  o.require(r.r_squared && std::abs(*r.r_squared - 0.9) <= kMetricTolerance, "R2 off");
  const auto perfect = evalx::regression_metrics(y, y);
  o.require(perfect.mse == 0 && perfect.r_squared == 1.0 && perfect.explained_variance == 1.0, "perfect case");
  const auto mean = evalx::regression_metrics(y, std::vector<double>(4, 2.5));
  o.require(mean.r_squared == 0.0, "mean case");
  if (o.pass) o.detail = "MSE 0.125, MAE 0.25, R2 0.9";
  return o;
}

// 3 ---------------------------------------------------------------------------
Outcome forest_determinism() {
  Outcome o;
  std::vector<catalog::LabeledRow> rows(200);
  SplitMix64 rng(2024);
  for (auto& r : rows) {
    r.features = {10 * rng.uniform01(), 10 * rng.uniform01(), 10 * rng.uniform01()};
    r.target = 2 * r.features[0] + r.features[1];
  }
  forest::ForestConfig config;
  config.num_trees = 20;
  config.max_depth = 8;
  config.seed = 7;
  const auto dir = scratch("forest");
  forest::save_model(forest::train(rows, config), dir / "a.json");
  const auto model = forest::train(rows, config);
  forest::save_model(model, dir / "b.json");
  o.require(slurp(dir / "a.json") == slurp(dir / "b.json"), "model files differ");

  std::vector<double> y, yh;
  for (const auto& r : rows) y.push_back(r.target), yh.push_back(model.predict(r.features));
  const auto r2 = evalx::regression_metrics(y, yh).r_squared.value_or(-1);
  o.require(r2 >= kForestMinR2, "training R2 " + fmt(r2));
  fs::remove_all(dir);
  if (o.pass) o.detail = "byte-identical, training R2 " + fmt(r2);
  return o;
}

// 4 ---------------------------------------------------------------------------
struct PipelineOutput {
  std::vector<experiment::SentimentRow> sentiment;
  std::vector<std::pair<std::string, double>> model1;
  std::vector<std::pair<std::string, double>> model3;
  std::string report;

  bool operator==(const PipelineOutput&) const = default;
};

PipelineOutput run_pipeline(const experiment::ParallelConfig& parallel) {
  const auto dir = scratch("par-" + std::to_string(parallel.partitions));
  experiment::GeneratorConfig g;
  g.effect_delta = 8;
  const auto files = experiment::write_cohort(experiment::generate(g), dir);
  storage::RawStore store;
  (void)ingest::import_table(store, files.marks, catalog::student_record_schema(), 1);
  (void)ingest::import_feedback(store, files.feedback, 1);

  PipelineOutput out;
  out.sentiment = experiment::run_model2(store, lexicon(), parallel);
  experiment::write_sentiment_frame(out.sentiment, dir / "sentiment.laf");
  experiment::merge_sentiment(store, out.sentiment, "marks", 2);
  forest::ForestConfig f;
  f.num_trees = 30;
  const auto run = experiment::run_model3(store, "marks", dir / "sentiment.laf",
                                          experiment::JoinPolicy::RespondentsOnly, {}, f, parallel);
  auto keyed = [](const experiment::ModelRun& m) {
    std::vector<std::pair<std::string, double>> v;
    for (std::size_t i = 0; i < m.test_keys.size(); ++i) v.emplace_back(m.test_keys[i], m.test_predictions[i]);
    std::sort(v.begin(), v.end());
    return v;
  };
  out.model1 = keyed(run.model1);
  out.model3 = keyed(run.model3);
  out.report = evalx::render_json(run.model3.report);
  fs::remove_all(dir);
  return out;
}

Outcome parallelism() {
  Outcome o;
  const auto base = run_pipeline({1, 1});
  o.require(base.sentiment.size() == 126 && !base.model3.empty(), "unexpected pipeline shape");
  for (const auto& p : {experiment::ParallelConfig{4, 2}, experiment::ParallelConfig{8, 8}}) {
    o.require(run_pipeline(p) == base,
              "(" + std::to_string(p.partitions) + "," + std::to_string(p.workers) + ") differs from (1,1)");
  }
  if (o.pass) o.detail = "(1,1) (4,2) (8,8) identical";
  return o;
}

// 5 ---------------------------------------------------------------------------
Outcome frame_round_trip() {
  Outcome o;
  storage::ColumnTable t;
  SplitMix64 rng(5);
  std::vector<std::string> ids;
  for (int i = 0; i < 500; ++i) ids.push_back("s" + std::to_string(10000 + i));
  t.columns.push_back({"student_id", ids, {}});
  for (int c = 0; c < 10; ++c) {
    std::vector<double> v(500);
    for (auto& x : v) x = std::ldexp(static_cast<double>(rng.next() >> 11), -40) - 1e3;
    t.columns.push_back({"c" + std::to_string(c), v, {}});
  }
  const auto dir = scratch("frame");
  storage::write_frame(t, dir / "t.laf");
  const auto back = storage::read_frame(dir / "t.laf");
  bool bit_exact = back.columns.size() == 11 && back.columns[0] == t.columns[0];
  for (std::size_t c = 1; bit_exact && c < 11; ++c) {
    const auto& a = t.columns[c].f64();
    const auto& b = back.columns[c].f64();
    bit_exact = a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
  }
  o.require(bit_exact, "round trip not bit-exact");

  storage::FrameReadStats stats;
  (void)storage::read_frame(dir / "t.laf", std::vector<std::string>{"student_id", "c4"}, &stats);
  const double fraction = static_cast<double>(stats.bytes_read) / static_cast<double>(stats.file_size);
  o.require(fraction < kProjectionMaxFraction, "projection read " + fmt(fraction) + " of the file");

  {
    std::fstream f(dir / "t.laf", std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(1000);
    const char c = static_cast<char>(f.get());
    f.seekp(1000);
    f.put(static_cast<char>(c ^ 0x01));
  }
  bool detected = false;
  try {
    (void)storage::read_frame(dir / "t.laf");
  } catch (const CorruptFileError&) {
    detected = true;
  }
  o.require(detected, "corrupted byte not detected");
  fs::remove_all(dir);
  if (o.pass) o.detail = "bit-exact 500x11, projection read " + fmt(fraction) + " of the file";
  return o;
}

// 6 ---------------------------------------------------------------------------
Outcome experiment_run() {
  Outcome o;
  const auto dir = scratch("lab");
  auto planted = experiment::LabConfig::load(kData / "config" / "lab_default.conf");
  planted.lexicon = kData / "lexicon" / "education.tsv";
  o.require(planted.seeds == 5 && planted.generator.n_students == 500 &&
                planted.join == experiment::JoinPolicy::RespondentsOnly,
            "default config is not the 5-seed, 500-student respondents_only run");
  const auto a = experiment::run_lab(planted, {1, 2, 3}, dir / "planted");
  const auto& c = *a.comparison;
  o.require(c.improvement >= kMinImprovement, "mean improvement " + fmt(c.improvement));
  o.require(c.positive >= kMinPositiveSeeds, std::to_string(c.positive) + "/5 seeds positive");

  auto null = experiment::LabConfig::load(kData / "config" / "lab_null.conf");
  null.lexicon = planted.lexicon;
  o.require(null.generator.effect_delta == 0, "null config has an effect");
  const auto b = experiment::run_lab(null, {1, 2, 3}, dir / "null");
  const auto& n = *b.comparison;
  o.require(std::abs(n.improvement) <= kNullBand, "null improvement " + fmt(n.improvement));
  fs::remove_all(dir);
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("planted R2 ") + fmt(c.r2_model1) + " -> " +
              fmt(c.r2_model3) + " (+" + fmt(c.improvement) + ", " + std::to_string(c.positive) + "/" +
              std::to_string(c.per_seed.size()) + " positive); null " + fmt(n.improvement) + " over " +
              std::to_string(n.per_seed.size()) + " seeds";
  return o;
}

// 7 ---------------------------------------------------------------------------
Outcome sizing() {
  Outcome o;
  const auto plan = storage::estimate_storage(60000, 2 * storage::kMiB, 1);
  o.require(plan.total_bytes == 125829120000ULL, "total " + std::to_string(plan.total_bytes));
  const auto text = storage::render(plan);
  o.require(text.find("≈120 GB") != std::string::npos, "rendered '" + text + "'");
  if (o.pass) o.detail = text;
  return o;
}

// 8 ---------------------------------------------------------------------------
Outcome ingestion() {
  Outcome o;
  const auto dir = scratch("ingest");
  experiment::GeneratorConfig g;
  g.seed = 8;
  const auto files = experiment::write_cohort(experiment::generate(g), dir);

  storage::RawStore store(dir / "store");
  (void)ingest::import_table(store, files.marks, catalog::student_record_schema(), 1);
  const auto before = snapshot_dir(dir / "store");
  const auto again = ingest::import_table(store, files.marks, catalog::student_record_schema(), 1);
  o.require(again.no_op && snapshot_dir(dir / "store") == before, "re-import changed the store");

  // Every 20th data row damaged: 5% malformed.
  std::ifstream in(files.marks);
  std::string text, line;
  std::size_t input_rows = 0, damaged = 0;
  for (std::size_t i = 0; std::getline(in, line); ++i) {
    if (i > 0) {
      ++input_rows;
      if (i % 20 == 0) {
        // Alternately a dropped trailing field and a non-numeric gpa.
        const auto c1 = line.find(',');
        line = (++damaged % 2) ? line.substr(0, line.rfind(','))
                               : line.substr(0, c1 + 1) + "n/a" + line.substr(line.find(',', c1 + 1));
      }
    }
    text += line + "\n";
  }
  std::ofstream(dir / "dirty.csv") << text;
  storage::RawStore dirty;
  const auto m = ingest::import_table(dirty, dir / "dirty.csv", catalog::student_record_schema(), 1);
  o.require(m.quarantined_count == damaged, std::to_string(m.quarantined_count) + " quarantined, " +
                                                std::to_string(damaged) + " damaged");
  o.require(m.row_count + m.quarantined_count == input_rows, "rows not conserved");
  fs::remove_all(dir);
  if (o.pass) {
    o.detail = "re-import byte-identical; " + std::to_string(m.row_count) + " valid + " +
               std::to_string(m.quarantined_count) + " quarantined = " + std::to_string(input_rows);
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double limit_s;  // 0: no time limit
  };
  const std::vector<Criterion> criteria{
      {1, "sentiment banding", banding, kLimitBanding},
      {2, "metric oracles", metrics, 0},
      {3, "forest determinism", forest_determinism, kLimitForest},
      {4, "parallelism invariance", parallelism, 0},
      {5, "frame round trip", frame_round_trip, 0},
      {6, "integrated experiment", experiment_run, kLimitExperiment},
      {7, "storage sizing", sizing, 0},
      {8, "ingestion idempotence", ingestion, 0},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) o.require(false, "took " + fmt(secs) + " s, limit " + fmt(c.limit_s));
    std::printf("criterion %d %-24s %s  (%.2f s) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
