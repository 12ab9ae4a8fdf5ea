#include <fnmatch.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "lak/error.hpp"
#include "lak/executor.hpp"
#include "lak/fileio.hpp"
#include "lak/hash.hpp"
#include "lak/ingest.hpp"

namespace lak::ingest {

SourceKind parse_source_kind(std::string_view text) {
  if (text == "table") return SourceKind::Table;
  if (text == "events") return SourceKind::Events;
  if (text == "feedback") return SourceKind::Feedback;
  throw ConfigError("unknown source kind '" + std::string(text) + "' (expected table, events or feedback)");
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::Table: return "table";
    case SourceKind::Events: return "events";
    case SourceKind::Feedback: return "feedback";
  }
  return "?";
}

bool glob_match(std::string_view pattern, std::string_view name) {
  return ::fnmatch(std::string(pattern).c_str(), std::string(name).c_str(), 0) == 0;
}

std::vector<ScheduleEntry> parse_schedule(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<ScheduleEntry> out;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() || base_dir.empty() ? path : base_dir / path).lexically_normal().string();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> w;
    for (std::string tok; words >> tok;) w.push_back(tok);
    if (w.empty()) continue;
    auto fail = [&](const std::string& why) {
      return ConfigError("schedule line " + std::to_string(line_no) + ": " + why);
    };
    if (w.size() < 4 || w.size() > 5) throw fail("expected '<source_id> <kind> <glob> <interval> [schema]'");
    ScheduleEntry e;
    e.source_id = w[0];
    if (!ids.insert(e.source_id).second) throw fail("duplicate source id '" + e.source_id + "'");
    e.kind = parse_source_kind(w[1]);
    e.pattern = resolve(w[2]);
    try {
      std::size_t used = 0;
      e.interval = std::stoll(w[3], &used);
      if (used != w[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw fail("interval '" + w[3] + "' is not an integer");
    }
    if (e.interval <= 0) throw fail("interval must be positive");
    if (w.size() == 5) e.schema_path = resolve(w[4]);
    if (e.kind == SourceKind::Table && e.schema_path.empty()) throw fail("table source needs a schema file");
    out.push_back(std::move(e));
  }
  return out;
}

Scheduler::Scheduler(storage::RawStore& store, std::vector<ScheduleEntry> entries, std::size_t workers)
    : store_(store), entries_(std::move(entries)), workers_(workers) {
  for (const auto& e : entries_) {
    if (e.interval <= 0) throw ConfigError("source '" + e.source_id + "' has a non-positive interval");
    schemas_.push_back(e.kind == SourceKind::Table ? catalog::load_schema(e.schema_path) : catalog::TableSchema{});
    locks_.push_back(std::make_unique<std::mutex>());
  }
}

std::vector<SnapshotManifest> Scheduler::poll(std::size_t index, std::int64_t now, std::size_t& skipped) {
  const ScheduleEntry& e = entries_[index];
  std::lock_guard lock(*locks_[index]);

  const std::filesystem::path pattern(e.pattern);
  const auto dir = pattern.has_parent_path() ? pattern.parent_path() : std::filesystem::path(".");
  const std::string name_glob = pattern.filename().string();
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && glob_match(name_glob, entry.path().filename().string())) {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());

  const auto previous = manifests(store_, e.source_id);
  std::set<std::uint64_t> seen;
  for (const auto& m : previous) seen.insert(m.content_digest);
  std::int64_t next = previous.empty() ? 1 : previous.back().snapshot_id + 1;

  std::vector<SnapshotManifest> out;
  for (const auto& file : files) {
    const std::uint64_t digest = fnv1a64(read_text_file(file));
    if (!seen.insert(digest).second) {
      ++skipped;
      continue;
    }
    ImportOptions opts{e.source_id, {}, now};
    SnapshotManifest m;
    switch (e.kind) {
      case SourceKind::Table: m = import_table(store_, file, schemas_[index], next, opts); break;
      case SourceKind::Events: m = import_events(store_, file, next, opts); break;
      case SourceKind::Feedback: m = import_feedback(store_, file, next, opts); break;
    }
    ++next;
    out.push_back(std::move(m));
  }
  return out;
}

TickReport Scheduler::tick(std::int64_t now) {
  std::vector<std::size_t> due;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (now >= 0 && now % entries_[i].interval == 0) due.push_back(i);
  }
  std::vector<std::vector<SnapshotManifest>> results(due.size());
  std::vector<std::size_t> skipped(due.size(), 0);
  Executor(workers_).run(due.size(), [&](std::size_t k) { results[k] = poll(due[k], now, skipped[k]); });

  TickReport report;
  report.time = now;
  for (std::size_t k = 0; k < due.size(); ++k) {
    report.skipped += skipped[k];
    for (auto& m : results[k]) report.imported.push_back(std::move(m));
  }
  return report;
}

std::vector<TickReport> Scheduler::run(std::int64_t from, std::int64_t to) {
  std::vector<TickReport> out;
  for (std::int64_t t = std::max<std::int64_t>(from, 0); t <= to; ++t) {
    const bool any_due = std::any_of(entries_.begin(), entries_.end(),
                                     [t](const ScheduleEntry& e) { return t % e.interval == 0; });
    if (any_due) out.push_back(tick(t));
  }
  return out;
}

}  // namespace lak::ingest
