#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lak/catalog.hpp"
#include "lak/evalx.hpp"
#include "lak/forest.hpp"
#include "lak/raw_store.hpp"
#include "lak/sentiment.hpp"

namespace lak::experiment {

// ---------------------------------------------------------------------------
// Synthetic cohort
// ---------------------------------------------------------------------------

enum class Attitude { Negative, Neutral, Positive };

std::string_view to_string(Attitude a);
Attitude parse_attitude(std::string_view text);

struct GeneratorConfig {
  std::size_t n_students = 500;
  double response_rate = 0.252;
  double p_negative = 0.3;
  double p_neutral = 0.4;
  double p_positive = 0.3;
  double effect_delta = 0.0;  // final-exam points added (positive) or removed (negative)
  double noise_sigma = 0.1;   // per-mark noise as a fraction of the mark's maximum
  std::uint64_t seed = 0;

  // Throws ConfigError naming the violated constraint.
  void validate() const;
  [[nodiscard]] std::size_t respondents() const;
};

struct GroundTruth {
  std::string student_id;
  double ability = 0;
  Attitude attitude = Attitude::Neutral;
  bool respondent = false;
};

struct Cohort {
  std::vector<catalog::StudentRecord> marks;        // sorted by student_id
  std::vector<catalog::FeedbackDocument> feedback;  // respondents, sorted by student_id
  std::vector<GroundTruth> truth;
};

// Deterministic per config. Each student draws from their own stream, so
// the response rate does not change anyone's marks.
Cohort generate(const GeneratorConfig& config);

// Sentences a student of the given attitude writes. Every sentence lands in
// its attitude's band under the shipped lexicon.
const std::vector<std::string>& sentence_pool(Attitude attitude);

struct CohortFiles {
  std::filesystem::path marks;     // marks.csv
  std::filesystem::path feedback;  // feedback.csv
  std::filesystem::path truth;     // truth.csv
};

CohortFiles write_cohort(const Cohort& cohort, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

enum class JoinPolicy { RespondentsOnly, ImputeNeutral };

std::string_view to_string(JoinPolicy p);
JoinPolicy parse_join_policy(std::string_view text);

struct SplitConfig {
  double train_fraction = evalx::kDefaultTrainFraction;
  std::uint64_t seed = 0;
};

// Partitioning of the dataflow stages. Results never depend on it.
struct ParallelConfig {
  std::size_t partitions = 4;
  std::size_t workers = 1;
};

struct ModelRun {
  evalx::RegressionReport report;
  std::vector<std::string> test_keys;
  std::vector<double> test_predictions;
};

// Model 1: the ten structured inputs against total_100, holdout evaluation.
ModelRun run_model1(std::span<const catalog::StudentRecord> marks, const SplitConfig& split,
                    const forest::ForestConfig& forest);

struct SentimentRow {
  std::string student_id;
  double sentiment_score = sentiment::kNeutralScore;
  sentiment::Category sentiment = sentiment::Category::Neutral;

  friend bool operator==(const SentimentRow&, const SentimentRow&) = default;
};

// Model 2: sentence-level scoring of every feedback row in `table` through
// the dataflow layer, averaged per student. One row per respondent, sorted.
std::vector<SentimentRow> run_model2(const storage::RawStore& store, const sentiment::Lexicon& lexicon,
                                     const ParallelConfig& parallel, std::string_view table = "feedback");

// Frame with columns student_id, sentiment_score, sentiment.
void write_sentiment_frame(std::span<const SentimentRow> rows, const std::filesystem::path& path);
std::vector<SentimentRow> read_sentiment_frame(const std::filesystem::path& path);

// Adds cells s:sentiment_score and s:sentiment to the students' rows.
void merge_sentiment(storage::RawStore& store, std::span<const SentimentRow> rows, std::string_view table,
                     storage::Timestamp ts);

struct PairedRun {
  JoinPolicy policy = JoinPolicy::RespondentsOnly;
  std::size_t rows = 0;  // joined rows both models saw
  std::size_t imputed = 0;
  std::vector<std::string> train_keys;
  std::vector<std::string> test_keys;
  ModelRun model1;
  ModelRun model3;
};

// Model 3 with Model 1 re-run on the same rows and the same split. Marks
// come from the raw store table, sentiment from the frame file; both are
// joined through the dataflow layer. Throws InvalidArgument on an empty join.
PairedRun run_model3(const storage::RawStore& store, std::string_view marks_table,
                     const std::filesystem::path& sentiment_frame, JoinPolicy policy, const SplitConfig& split,
                     const forest::ForestConfig& forest, const ParallelConfig& parallel);

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

inline constexpr double kReferenceR2Model1 = 0.79;
inline constexpr double kReferenceR2Model3 = 0.89;

struct SeedResult {
  std::uint64_t seed = 0;
  std::size_t rows = 0;
  double r2_model1 = 0;
  double r2_model3 = 0;
  double improvement = 0;  // r2_model3 - r2_model1
};

struct ComparisonReport {
  std::vector<SeedResult> per_seed;
  double r2_model1 = 0;  // means over seeds
  double r2_model3 = 0;
  double improvement = 0;
  std::size_t positive = 0;  // seeds where Model 3 beat Model 1
  std::vector<std::pair<std::string, std::string>> config;
};

// Throws InvalidArgument when a pair was not evaluated on the same rows or
// an R-squared is undefined.
ComparisonReport compare(std::span<const PairedRun> runs, std::span<const std::uint64_t> seeds,
                         std::vector<std::pair<std::string, std::string>> config = {});

std::string render_text(const ComparisonReport& report);
std::string render_json(const ComparisonReport& report);

// ---------------------------------------------------------------------------
// Lab
// ---------------------------------------------------------------------------

// Line-oriented "key = value" file; '#' comments. Unknown keys are errors.
struct LabConfig {
  GeneratorConfig generator;
  SplitConfig split;
  forest::ForestConfig forest;
  ParallelConfig parallel;
  JoinPolicy join = JoinPolicy::RespondentsOnly;
  std::size_t seeds = 5;
  std::size_t seed_workers = 1;
  std::filesystem::path lexicon;  // empty: the shipped lexicon

  static LabConfig parse(std::string_view text, const std::filesystem::path& base_dir = {});
  static LabConfig load(const std::filesystem::path& path);
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> echo() const;
};

// Seed i uses generator seed derive_seed(generator.seed, i) and likewise for
// the split and forest seeds.
struct SeedConfig {
  GeneratorConfig generator;
  SplitConfig split;
  forest::ForestConfig forest;
};

SeedConfig seed_config(const LabConfig& config, std::size_t index);

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<ModelRun> model1_full;  // Model 1 on every student
  std::vector<SentimentRow> sentiment;
  std::optional<PairedRun> paired;
};

// Generates, ingests and runs the requested models for one seed inside
// `work_dir` (marks.csv, feedback.csv, truth.csv, store/, sentiment.laf).
SeedOutcome run_seed(const LabConfig& config, std::size_t index, const std::set<int>& models,
                     const std::filesystem::path& work_dir);

struct LabResult {
  std::vector<SeedOutcome> seeds;
  std::optional<ComparisonReport> comparison;  // when Model 3 ran
};

// Runs config.seeds seeds under out_dir/seed-<i>/ and writes report.txt and
// report.json to out_dir.
LabResult run_lab(const LabConfig& config, const std::set<int>& models, const std::filesystem::path& out_dir);

// Shipped data files: $LAK_DATA_DIR, then the source tree, then the install prefix.
std::filesystem::path data_file(const std::filesystem::path& rel);
std::filesystem::path default_lexicon_path();
std::filesystem::path default_lab_config_path();

}  // namespace lak::experiment
