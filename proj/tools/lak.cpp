// Command-line front end: ingestion, storage inspection, sentiment scoring,
// evaluation and the model-comparison lab.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "lak/catalog.hpp"
#include "lak/error.hpp"
#include "lak/evalx.hpp"
#include "lak/experiment.hpp"
#include "lak/fileio.hpp"
#include "lak/frame.hpp"
#include "lak/hash.hpp"
#include "lak/ingest.hpp"
#include "lak/raw_store.hpp"
#include "lak/schema.hpp"
#include "lak/sentiment.hpp"
#include "lak/sizing.hpp"

namespace {

using namespace lak;

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void print_manifest(const ingest::SnapshotManifest& m) {
  std::cout << "source " << m.source_id << " snapshot " << m.snapshot_id << (m.no_op ? " (already ingested)" : "")
            << "\n  rows " << m.row_count << ", quarantined " << m.quarantined_count << ", duplicates "
            << m.duplicate_count << "\n  digest " << to_hex(m.content_digest) << "\n";
  for (const auto& w : m.warnings) std::cout << "  warning: " << w << "\n";
}

// A store directory lists every table; a table log shows that table's rows.
void inspect_store(const std::filesystem::path& target) {
  const bool whole = std::filesystem::is_directory(target);
  const storage::RawStore store(whole ? target : target.parent_path());
  const std::vector<std::string> tables = whole ? store.tables() : std::vector<std::string>{target.stem().string()};
  std::cout << "store " << store.directory().string() << "\n";
  for (const auto& t : tables) {
    std::cout << "  table " << t << ": " << store.row_count(t) << " rows\n";
    if (whole) continue;
    std::size_t shown = 0;
    for (const auto& row : store.scan_all(t)) {
      if (++shown > 5) break;
      std::cout << "    " << row.row_key << " (" << row.cells.size() << " cells)\n";
    }
  }
  if (!store.has_table(ingest::kManifestTable)) return;
  for (const auto& row : store.scan_all(ingest::kManifestTable)) {
    const auto slash = row.row_key.rfind('/');
    const auto m = ingest::find_manifest(store, row.row_key.substr(0, slash), std::stoll(row.row_key.substr(slash + 1)));
    if (m && (whole || m->source_id == target.stem().string())) print_manifest(*m);
  }
}

std::set<int> parse_models(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.empty()) continue;
    try {
      out.insert(std::stoi(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad model number '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-analytics pipeline: ingest, store, score, train and compare"};
  app.require_subcommand(1);

  // ingest ------------------------------------------------------------------
  auto* ingest_cmd = app.add_subcommand("ingest", "Import a snapshot into the raw store");
  ingest_cmd->require_subcommand(1);
  std::string store_dir = "lak-store";
  std::string path, schema_path = (experiment::default_lexicon_path().parent_path().parent_path() / "schema" /
                                   "student_record.schema")
                                      .string();
  std::string source, marks_table = "marks";
  std::int64_t snapshot = 0;
  std::optional<std::int64_t> at;
  auto add_common = [&](CLI::App* c) {
    c->add_option("--path", path, "Input file")->required();
    c->add_option("--snapshot", snapshot, "Snapshot id (must increase per source)")->required();
    c->add_option("--store", store_dir, "Raw store directory")->capture_default_str();
    c->add_option("--source", source, "Source id (default: the destination table)");
    c->add_option("--at", at, "Ingestion time in epoch ms (default: now)");
  };
  auto* ingest_table = ingest_cmd->add_subcommand("table", "Delimited table export");
  add_common(ingest_table);
  ingest_table->add_option("--schema", schema_path, "Table schema file")->capture_default_str();
  auto* ingest_events = ingest_cmd->add_subcommand("events", "Line-delimited JSON app events");
  add_common(ingest_events);
  auto* ingest_feedback = ingest_cmd->add_subcommand("feedback", "Feedback form export");
  add_common(ingest_feedback);
  ingest_feedback->add_option("--marks-table", marks_table, "Table used for the orphan check")->capture_default_str();

  auto* ingest_schedule = ingest_cmd->add_subcommand("schedule", "Poll configured sources on a virtual clock");
  std::string schedule_config;
  std::int64_t from = 0, to = 0;
  std::size_t workers = 1;
  ingest_schedule->add_option("--config", schedule_config, "Schedule file")->required();
  ingest_schedule->add_option("--store", store_dir, "Raw store directory")->capture_default_str();
  ingest_schedule->add_option("--from", from, "First virtual tick")->capture_default_str();
  ingest_schedule->add_option("--to", to, "Last virtual tick")->capture_default_str();
  ingest_schedule->add_option("--workers", workers, "Sources imported in parallel")->capture_default_str();

  // store -------------------------------------------------------------------
  auto* store_cmd = app.add_subcommand("store", "Storage utilities");
  store_cmd->require_subcommand(1);
  auto* inspect = store_cmd->add_subcommand("inspect", "Describe a frame file, a raw-store table log or a store directory");
  std::string inspect_file;
  inspect->add_option("file", inspect_file, "Frame file, table log or store directory")->required();
  auto* estimate = store_cmd->add_subcommand("estimate", "Replication-aware storage estimate");
  std::uint64_t students = 60000, bytes_per_student = 2 * storage::kMiB, replication = 1;
  estimate->add_option("--students", students)->capture_default_str();
  estimate->add_option("--bytes-per-student", bytes_per_student)->capture_default_str();
  estimate->add_option("--replication", replication)->capture_default_str();

  // sentiment ---------------------------------------------------------------
  auto* sentiment_cmd = app.add_subcommand("sentiment", "Feedback sentiment");
  sentiment_cmd->require_subcommand(1);
  auto* score = sentiment_cmd->add_subcommand("score", "Score a feedback export into a frame file");
  std::string feedback_path, lexicon_path = experiment::default_lexicon_path().string(), out_path;
  experiment::ParallelConfig parallel;
  score->add_option("--feedback", feedback_path, "Feedback CSV")->required();
  score->add_option("--lexicon", lexicon_path, "Lexicon file")->capture_default_str();
  score->add_option("--out", out_path, "Output frame file")->required();
  score->add_option("--partitions", parallel.partitions)->capture_default_str();
  score->add_option("--workers", parallel.workers)->capture_default_str();

  // evaluate ----------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against truth");
  std::string pred_path, truth_path, key = "student_id";
  bool classification = false, as_json = false;
  evaluate->add_option("--pred", pred_path, "Predictions CSV")->required();
  evaluate->add_option("--truth", truth_path, "Truth CSV")->required();
  evaluate->add_option("--key", key, "Join column, used when both files have it")->capture_default_str();
  evaluate->add_flag("--classification", classification, "Binary labels instead of regression");
  evaluate->add_flag("--json", as_json, "Machine-readable output");

  // lab ---------------------------------------------------------------------
  auto* lab = app.add_subcommand("lab", "Synthetic cohort and model comparison");
  lab->require_subcommand(1);
  auto* gen = lab->add_subcommand("gen", "Write a synthetic cohort");
  std::string lab_config_path, gen_out = "cohort";
  std::size_t seed_index = 0;
  gen->add_option("--config", lab_config_path, "Lab config file")->required();
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--seed-index", seed_index, "Which seed of the config to generate")->capture_default_str();

  auto* run = lab->add_subcommand("run", "Run Models 1-3 over several seeds");
  std::string models_text = "1,2,3", join_text, report_dir = "report";
  std::optional<std::size_t> seeds;
  run->add_option("--config", lab_config_path, "Lab config file (default: the shipped lab_default.conf)");
  run->add_option("--models", models_text, "Comma-separated model numbers")->capture_default_str();
  run->add_option("--join", join_text, "respondents_only or impute_neutral");
  run->add_option("--seeds", seeds, "Number of seeds");
  run->add_option("--out", report_dir, "Report directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest_cmd->parsed()) {
      if (ingest_schedule->parsed()) {
        storage::RawStore store(store_dir);
        const auto entries = ingest::parse_schedule(read_text_file(schedule_config),
                                                    std::filesystem::path(schedule_config).parent_path());
        ingest::Scheduler scheduler(store, entries, workers);
        for (const auto& tick : scheduler.run(from, to)) {
          std::cout << "tick " << tick.time << ": " << tick.imported.size() << " imported, " << tick.skipped
                    << " unchanged\n";
          for (const auto& m : tick.imported) print_manifest(m);
        }
        return 0;
      }
      storage::RawStore store(store_dir);
      ingest::ImportOptions opts{source, {}, at.value_or(now_ms())};
      ingest::SnapshotManifest m;
      if (ingest_table->parsed()) {
        m = ingest::import_table(store, path, catalog::load_schema(schema_path), snapshot, opts);
      } else if (ingest_events->parsed()) {
        m = ingest::import_events(store, path, snapshot, opts);
      } else {
        m = ingest::import_feedback(store, path, snapshot, opts, marks_table);
        std::cout << "respondents " << m.row_count - m.duplicate_count << "\n";
      }
      print_manifest(m);
      return 0;
    }

    if (store_cmd->parsed()) {
      if (inspect->parsed()) {
        if (std::filesystem::is_directory(inspect_file) || inspect_file.ends_with(".log")) {
          inspect_store(inspect_file);
          return 0;
        }
        const auto footer = storage::read_footer(inspect_file);
        std::printf("file %s\n  size %llu bytes, rows %llu, columns %zu, checksum %s\n", inspect_file.c_str(),
                    static_cast<unsigned long long>(footer.file_size),
                    static_cast<unsigned long long>(footer.total_rows), footer.chunks.size(),
                    to_hex(footer.checksum).c_str());
        for (const auto& c : footer.chunks) {
          std::printf("  %-24s %-8s offset %-10llu length %-10llu checksum %s\n", c.name.c_str(),
                      std::string(storage::to_string(c.kind)).c_str(), static_cast<unsigned long long>(c.offset),
                      static_cast<unsigned long long>(c.length), to_hex(c.checksum).c_str());
        }
      } else {
        std::cout << storage::render(storage::estimate_storage(students, bytes_per_student, replication)) << "\n";
      }
      return 0;
    }

    if (sentiment_cmd->parsed()) {
      const auto lexicon = sentiment::Lexicon::load(lexicon_path);
      storage::RawStore store;
      ingest::import_feedback(store, feedback_path, 0, {"feedback", "feedback", 0});
      const auto rows = experiment::run_model2(store, lexicon, parallel);
      experiment::write_sentiment_frame(rows, out_path);
      std::size_t counts[3] = {0, 0, 0};
      for (const auto& r : rows) ++counts[static_cast<int>(r.sentiment)];
      std::cout << rows.size() << " respondents scored: " << counts[0] << " Negative, " << counts[1] << " Neutral, "
                << counts[2] << " Positive\nwrote " << out_path << "\n";
      return 0;
    }

    if (evaluate->parsed()) {
      const auto paired = evalx::read_paired_csv(pred_path, truth_path, key);
      if (classification) {
        const auto r = evalx::classification_metrics(paired.truth, paired.predicted);
        std::cout << (as_json ? evalx::render_json(r) : evalx::render_text(r));
      } else {
        const auto r = evalx::regression_metrics(paired.truth, paired.predicted);
        std::cout << (as_json ? evalx::render_json(r) : evalx::render_text(r));
      }
      return 0;
    }

    if (lab->parsed()) {
      auto config = experiment::LabConfig::load(lab_config_path.empty() ? experiment::default_lab_config_path()
                                                                        : std::filesystem::path(lab_config_path));
      if (gen->parsed()) {
        const auto sc = experiment::seed_config(config, seed_index);
        const auto cohort = experiment::generate(sc.generator);
        const auto files = experiment::write_cohort(cohort, gen_out);
        std::cout << cohort.marks.size() << " students, " << cohort.feedback.size() << " feedback rows\nwrote "
                  << files.marks.string() << ", " << files.feedback.string() << ", " << files.truth.string() << "\n";
        return 0;
      }
      if (!join_text.empty()) config.join = experiment::parse_join_policy(join_text);
      if (seeds) config.seeds = *seeds;
      const auto result = experiment::run_lab(config, parse_models(models_text), report_dir);
      std::cout << read_text_file(std::filesystem::path(report_dir) / "report.txt");
      return 0;
    }
  } catch (const lak::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
