#include "lak/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

#include <nlohmann/json.hpp>

#include "lak/dataflow.hpp"
#include "lak/dataflow_sources.hpp"
#include "lak/error.hpp"
#include "lak/executor.hpp"
#include "lak/fileio.hpp"
#include "lak/frame.hpp"
#include "lak/ingest.hpp"
#include "lak/random.hpp"

namespace lak::experiment {
namespace {

using catalog::LabeledRow;
using catalog::StudentRecord;

ModelRun fit_and_score(const std::vector<LabeledRow>& rows, const std::vector<std::string>& keys,
                       const std::vector<catalog::FeatureDef>& layout, const evalx::Split& s,
                       const forest::ForestConfig& forest_config) {
  const auto [train, test] = evalx::apply_split<LabeledRow>(rows, s);
  const auto model = forest::train(train, forest_config, layout, "total_100");
  ModelRun run;
  run.test_predictions = model.predict(std::span<const LabeledRow>(test));
  std::vector<double> truth;
  for (const auto& r : test) truth.push_back(r.target);
  for (std::size_t i : s.test) run.test_keys.push_back(keys[i]);
  run.report = evalx::regression_metrics(truth, run.test_predictions);
  return run;
}

StudentRecord record_of(const storage::RawRow& row) {
  std::map<std::string, std::string, std::less<>> fields;
  fields.emplace("student_id", row.row_key);
  for (const auto& [q, cell] : row.cells) {
    if (q.starts_with("d:")) fields.emplace(q.substr(2), cell.value);
  }
  return catalog::record_from_fields(fields);
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string signed_fixed(double v) { return (v >= 0 ? "+" : "") + fixed(v); }

}  // namespace

std::string_view to_string(JoinPolicy p) {
  return p == JoinPolicy::RespondentsOnly ? "respondents_only" : "impute_neutral";
}

JoinPolicy parse_join_policy(std::string_view text) {
  if (text == "respondents_only") return JoinPolicy::RespondentsOnly;
  if (text == "impute_neutral") return JoinPolicy::ImputeNeutral;
  throw ConfigError("unknown join policy '" + std::string(text) + "' (expected respondents_only or impute_neutral)");
}

ModelRun run_model1(std::span<const StudentRecord> marks, const SplitConfig& split,
                    const forest::ForestConfig& forest) {
  const auto spec = catalog::FeatureSpec::model1(marks);
  std::vector<LabeledRow> rows;
  std::vector<std::string> keys;
  for (const auto& r : marks) {
    rows.push_back(catalog::encode_features(r, std::nullopt, spec));
    keys.push_back(r.student_id);
  }
  const auto s = evalx::split(rows.size(), split.train_fraction, split.seed);
  return fit_and_score(rows, keys, spec.layout(false), s, forest);
}

std::vector<SentimentRow> run_model2(const storage::RawStore& store, const sentiment::Lexicon& lexicon,
                                     const ParallelConfig& parallel, std::string_view table) {
  const Executor exec(parallel.workers);
  const auto feedback = dataflow::from_store(store, table, parallel.partitions);

  // (student, sentence score) for every sentence of every answer.
  const auto sentences = dataflow::flat_map(
      feedback,
      [&](const std::string& key, const storage::RawRow& row) {
        std::string text;
        for (const char* q : {"f:q1", "f:q2", "f:q3"}) {
          if (const auto* v = row.value(q)) text += *v;
          text += '\n';
        }
        std::vector<std::pair<std::string, double>> out;
        for (const auto& sentence : sentiment::split_sentences(text)) {
          out.emplace_back(key, sentiment::score_sentence(sentence, lexicon));
        }
        return out;
      },
      exec);

  using Acc = std::pair<std::size_t, double>;
  const auto totals = dataflow::aggregate_by_key(
      sentences, Acc{0, 0.0},
      [](Acc& acc, double score) {
        ++acc.first;
        acc.second += score;
      },
      [](Acc& acc, const Acc& other) {
        acc.first += other.first;
        acc.second += other.second;
      },
      exec);

  std::vector<SentimentRow> out;
  for (const auto& [key, row] : dataflow::collect(feedback)) {
    SentimentRow s{key, sentiment::kNeutralScore, sentiment::Category::Neutral};
    if (const auto it = totals.find(key); it != totals.end() && it->second.first > 0) {
      s.sentiment_score = it->second.second / static_cast<double>(it->second.first);
    }
    s.sentiment = sentiment::band(s.sentiment_score);
    out.push_back(std::move(s));
  }
  return out;
}

void write_sentiment_frame(std::span<const SentimentRow> rows, const std::filesystem::path& path) {
  std::vector<std::string> ids, labels;
  std::vector<double> scores;
  for (const auto& r : rows) {
    ids.push_back(r.student_id);
    scores.push_back(r.sentiment_score);
    labels.emplace_back(sentiment::to_string(r.sentiment));
  }
  storage::ColumnTable t;
  t.columns.push_back({"student_id", std::move(ids), {}});
  t.columns.push_back({std::string(catalog::kSentimentFeature), std::move(scores), {}});
  t.columns.push_back({"sentiment", std::move(labels), {}});
  storage::write_frame(t, path);
}

std::vector<SentimentRow> read_sentiment_frame(const std::filesystem::path& path) {
  const auto t = storage::read_frame(path);
  const auto& ids = t.at("student_id").text();
  const auto& scores = t.at(catalog::kSentimentFeature).f64();
  std::vector<SentimentRow> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.push_back({ids[i], scores[i], sentiment::band(scores[i])});
  return out;
}

void merge_sentiment(storage::RawStore& store, std::span<const SentimentRow> rows, std::string_view table,
                     storage::Timestamp ts) {
  std::vector<storage::RowWrite> writes;
  for (const auto& r : rows) {
    if (!store.get_row(table, r.student_id)) continue;  // orphans have no student row to extend
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", r.sentiment_score);
    writes.push_back({r.student_id,
                      {{"s:sentiment", std::string(sentiment::to_string(r.sentiment)), ts},
                       {"s:sentiment_score", buf, ts}}});
  }
  if (!writes.empty()) store.put_rows(table, std::move(writes));
}

PairedRun run_model3(const storage::RawStore& store, std::string_view marks_table,
                     const std::filesystem::path& sentiment_frame, JoinPolicy policy, const SplitConfig& split,
                     const forest::ForestConfig& forest, const ParallelConfig& parallel) {
  const Executor exec(parallel.workers);
  const auto marks = dataflow::map_values(
      dataflow::from_store(store, marks_table, parallel.partitions),
      [](const std::string&, const storage::RawRow& row) { return record_of(row); }, exec);

  const auto footer = storage::read_footer(sentiment_frame);
  std::size_t score_col = footer.chunks.size();
  for (std::size_t i = 0; i < footer.chunks.size(); ++i) {
    if (footer.chunks[i].name == catalog::kSentimentFeature) score_col = i;
  }
  if (score_col == footer.chunks.size()) {
    throw NotFoundError(sentiment_frame.string() + " has no " + std::string(catalog::kSentimentFeature) + " column");
  }
  const auto scores = dataflow::map_values(
      dataflow::from_frame(sentiment_frame, "student_id", parallel.partitions),
      [score_col](const std::string& key, const dataflow::FrameRecord& rec) {
        const auto* v = std::get_if<double>(&rec[score_col]);
        if (!v) throw CorruptFileError("sentiment score missing for " + key);
        return *v;
      },
      exec);

  const auto kind = policy == JoinPolicy::RespondentsOnly ? dataflow::JoinKind::Inner : dataflow::JoinKind::LeftOuter;
  const auto joined = dataflow::collect(dataflow::join_by_key(marks, scores, kind, exec));
  if (joined.empty()) throw InvalidArgument("joining marks with sentiment produced no rows");

  PairedRun out;
  out.policy = policy;
  out.rows = joined.size();
  std::vector<StudentRecord> records;
  std::vector<double> sentiment_values;
  std::vector<std::string> keys;
  for (const auto& [key, j] : joined) {
    keys.push_back(key);
    records.push_back(j.left);
    if (j.right) {
      sentiment_values.push_back(*j.right);
    } else {
      sentiment_values.push_back(sentiment::kNeutralScore);
      ++out.imputed;
    }
  }

  const auto spec = catalog::FeatureSpec::model1(records);
  std::vector<LabeledRow> rows1, rows3;
  for (std::size_t i = 0; i < records.size(); ++i) {
    rows1.push_back(catalog::encode_features(records[i], std::nullopt, spec));
    rows3.push_back(catalog::encode_features(records[i], sentiment_values[i], spec));
  }
  const auto s = evalx::split(records.size(), split.train_fraction, split.seed);
  for (std::size_t i : s.train) out.train_keys.push_back(keys[i]);
  for (std::size_t i : s.test) out.test_keys.push_back(keys[i]);

  forest::ForestConfig f = forest;
  f.workers = std::max(f.workers, parallel.workers);
  out.model1 = fit_and_score(rows1, keys, spec.layout(false), s, f);
  out.model3 = fit_and_score(rows3, keys, spec.layout(true), s, f);
  return out;
}

ComparisonReport compare(std::span<const PairedRun> runs, std::span<const std::uint64_t> seeds,
                         std::vector<std::pair<std::string, std::string>> config) {
  if (runs.size() != seeds.size()) throw InvalidArgument("compare needs one seed per run");
  if (runs.empty()) throw InvalidArgument("compare needs at least one run");
  ComparisonReport out;
  out.config = std::move(config);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const PairedRun& r = runs[i];
    if (r.model1.test_keys != r.model3.test_keys || r.model1.report.n != r.model3.report.n) {
      throw InvalidArgument("run " + std::to_string(i) + " evaluated the models on different rows");
    }
    if (!r.model1.report.r_squared || !r.model3.report.r_squared) {
      throw InvalidArgument("run " + std::to_string(i) + " has an undefined R-squared");
    }
    SeedResult s;
    s.seed = seeds[i];
    s.rows = r.rows;
    s.r2_model1 = *r.model1.report.r_squared;
    s.r2_model3 = *r.model3.report.r_squared;
    s.improvement = s.r2_model3 - s.r2_model1;
    out.r2_model1 += s.r2_model1;
    out.r2_model3 += s.r2_model3;
    out.improvement += s.improvement;
    if (s.improvement > 0) ++out.positive;
    out.per_seed.push_back(s);
  }
  const auto k = static_cast<double>(runs.size());
  out.r2_model1 /= k;
  out.r2_model3 /= k;
  out.improvement /= k;
  return out;
}

std::string render_text(const ComparisonReport& r) {
  std::string join = "?";
  for (const auto& [k, v] : r.config) {
    if (k == "join") join = v;
  }
  std::string out = "Model 1 vs Model 3, R-squared on the holdout split\n";
  out += "join policy: " + join +
         (join == "respondents_only" ? " (both models trained and tested on feedback respondents only)\n"
                                     : " (non-respondents get the neutral score 2.0)\n");
  char header[160];
  std::snprintf(header, sizeof header, "\n  %-20s %5s  %-6s   %-6s   %s\n", "seed", "rows", "model1", "model3",
                "improvement");
  out += header;
  for (const auto& s : r.per_seed) {
    char line[160];
    std::snprintf(line, sizeof line, "  %-20llu %5zu  %s   %s   %s\n", static_cast<unsigned long long>(s.seed), s.rows,
                  fixed(s.r2_model1).c_str(), fixed(s.r2_model3).c_str(), signed_fixed(s.improvement).c_str());
    out += line;
  }
  char line[160];
  std::snprintf(line, sizeof line, "  %-20s %5s  %s   %s   %s\n", "mean", "", fixed(r.r2_model1).c_str(),
                fixed(r.r2_model3).c_str(), signed_fixed(r.improvement).c_str());
  out += line;
  out += "\nModel 3 better in " + std::to_string(r.positive) + " of " + std::to_string(r.per_seed.size()) +
         " seeds\n";
  out += "reference (not reproduced): Model 1 R-squared " + fixed(kReferenceR2Model1, 2) + ", Model 3 R-squared " +
         fixed(kReferenceR2Model3, 2) + ", improvement " + fixed(kReferenceR2Model3 - kReferenceR2Model1, 2) + "\n";
  if (!r.config.empty()) {
    out += "\nconfig\n";
    for (const auto& [k, v] : r.config) out += "  " + k + " = " + v + "\n";
  }
  return out;
}

std::string render_json(const ComparisonReport& r) {
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& s : r.per_seed) {
    seeds.push_back({{"seed", std::to_string(s.seed)},
                     {"rows", s.rows},
                     {"r2_model1", s.r2_model1},
                     {"r2_model3", s.r2_model3},
                     {"improvement", s.improvement}});
  }
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  const nlohmann::json j{{"r2_model1", r.r2_model1},
                         {"r2_model3", r.r2_model3},
                         {"improvement", r.improvement},
                         {"positive_seeds", r.positive},
                         {"per_seed", seeds},
                         {"reference", {{"r2_model1", kReferenceR2Model1}, {"r2_model3", kReferenceR2Model3}}},
                         {"config", config}};
  return j.dump(2) + "\n";
}

SeedConfig seed_config(const LabConfig& config, std::size_t index) {
  SeedConfig s{config.generator, config.split, config.forest};
  s.generator.seed = derive_seed(config.generator.seed, index);
  s.split.seed = derive_seed(config.split.seed, index);
  s.forest.seed = derive_seed(config.forest.seed, index);
  return s;
}

SeedOutcome run_seed(const LabConfig& config, std::size_t index, const std::set<int>& models,
                     const std::filesystem::path& work_dir) {
  const SeedConfig sc = seed_config(config, index);
  SeedOutcome out;
  out.seed = sc.generator.seed;

  const auto files = write_cohort(generate(sc.generator), work_dir);
  std::filesystem::remove_all(work_dir / "store");
  storage::RawStore store(work_dir / "store");
  ingest::import_table(store, files.marks, catalog::student_record_schema(), 1, {"marks", "marks", 0});
  ingest::import_feedback(store, files.feedback, 1, {"feedback", "feedback", 0}, "marks");

  if (models.contains(1)) {
    const auto records = ingest::read_student_records(store, "marks");
    out.model1_full = run_model1(records, sc.split, sc.forest);
  }
  if (models.contains(2) || models.contains(3)) {
    const auto lexicon =
        sentiment::Lexicon::load(config.lexicon.empty() ? default_lexicon_path() : config.lexicon);
    out.sentiment = run_model2(store, lexicon, config.parallel);
    write_sentiment_frame(out.sentiment, work_dir / "sentiment.laf");
    merge_sentiment(store, out.sentiment, "marks", 2);
  }
  if (models.contains(3)) {
    out.paired = run_model3(store, "marks", work_dir / "sentiment.laf", config.join, sc.split, sc.forest,
                            config.parallel);
  }
  return out;
}

LabResult run_lab(const LabConfig& config, const std::set<int>& models, const std::filesystem::path& out_dir) {
  if (models.empty()) throw ConfigError("no models selected");
  for (int m : models) {
    if (m < 1 || m > 3) throw ConfigError("unknown model " + std::to_string(m) + " (expected 1, 2 or 3)");
  }
  if (config.seeds == 0) throw ConfigError("seeds must be positive");
  std::filesystem::create_directories(out_dir);

  LabResult result;
  result.seeds.resize(config.seeds);
  Executor(config.seed_workers).run(config.seeds, [&](std::size_t i) {
    result.seeds[i] = run_seed(config, i, models, out_dir / ("seed-" + std::to_string(i)));
  });

  std::string text;
  nlohmann::json doc{{"models", models}, {"seeds", nlohmann::json::array()}};
  for (std::size_t i = 0; i < result.seeds.size(); ++i) {
    const auto& s = result.seeds[i];
    nlohmann::json js{{"index", i}, {"seed", std::to_string(s.seed)}};
    text += "seed " + std::to_string(i) + " (" + std::to_string(s.seed) + ")\n";
    if (s.model1_full) {
      const auto& r = s.model1_full->report;
      text += "  Model 1, all " + std::to_string(r.n) + " test rows: R-squared " +
              (r.r_squared ? fixed(*r.r_squared) : std::string("undefined")) + "\n";
      js["model1_full"] = nlohmann::json::parse(evalx::render_json(r));
    }
    if (models.contains(2) || models.contains(3)) {
      std::map<std::string, std::size_t> bands;
      for (const auto& row : s.sentiment) ++bands[std::string(sentiment::to_string(row.sentiment))];
      text += "  Model 2: " + std::to_string(s.sentiment.size()) + " respondents scored (";
      bool first = true;
      for (const auto& [band, count] : bands) {
        text += (first ? "" : ", ") + band + " " + std::to_string(count);
        first = false;
      }
      text += ")\n";
      js["model2"] = {{"respondents", s.sentiment.size()}, {"bands", bands}};
    }
    if (s.paired) {
      text += "  Model 1 vs Model 3 on " + std::to_string(s.paired->rows) + " joined rows (" +
              std::to_string(s.paired->test_keys.size()) + " test)\n";
      js["model1"] = nlohmann::json::parse(evalx::render_json(s.paired->model1.report));
      js["model3"] = nlohmann::json::parse(evalx::render_json(s.paired->model3.report));
      js["joined_rows"] = s.paired->rows;
      js["imputed"] = s.paired->imputed;
    }
    doc["seeds"].push_back(std::move(js));
  }

  if (models.contains(3)) {
    std::vector<PairedRun> runs;
    std::vector<std::uint64_t> seeds;
    for (const auto& s : result.seeds) {
      runs.push_back(*s.paired);
      seeds.push_back(s.seed);
    }
    result.comparison = compare(runs, seeds, config.echo());
    text = render_text(*result.comparison) + "\n" + text;
    doc["comparison"] = nlohmann::json::parse(render_json(*result.comparison));
  } else {
    std::string cfg = "config\n";
    for (const auto& [k, v] : config.echo()) cfg += "  " + k + " = " + v + "\n";
    text += "\n" + cfg;
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [k, v] : config.echo()) c[k] = v;
    doc["config"] = c;
  }
  write_text_file(out_dir / "report.txt", text);
  write_text_file(out_dir / "report.json", doc.dump(2) + "\n");
  return result;
}

std::filesystem::path data_file(const std::filesystem::path& rel) {
  if (const char* env = std::getenv("LAK_DATA_DIR"); env && *env) return std::filesystem::path(env) / rel;
#ifdef LAK_SOURCE_DATA_DIR
  if (std::filesystem::exists(std::filesystem::path(LAK_SOURCE_DATA_DIR) / rel)) {
    return std::filesystem::path(LAK_SOURCE_DATA_DIR) / rel;
  }
#endif
#ifdef LAK_INSTALL_DATA_DIR
  return std::filesystem::path(LAK_INSTALL_DATA_DIR) / rel;
#else
  return std::filesystem::path("data") / rel;
#endif
}

std::filesystem::path default_lexicon_path() { return data_file(std::filesystem::path("lexicon") / "education.tsv"); }

std::filesystem::path default_lab_config_path() {
  return data_file(std::filesystem::path("config") / "lab_default.conf");
}

}  // namespace lak::experiment
