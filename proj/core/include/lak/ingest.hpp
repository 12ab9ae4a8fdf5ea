#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lak/catalog.hpp"
#include "lak/raw_store.hpp"
#include "lak/schema.hpp"

namespace lak::ingest {

// Raw-store layout written by the importers:
//   <table>             data rows, cells "d:<column>" (events "e:*", feedback "f:*"),
//                       cell timestamp = snapshot id
//   <table>_quarantine  rejected input rows, key "<snapshot>/<line>", cells q:reason, q:raw, q:line
//   _manifests          one row per snapshot, key "<source>/<snapshot>"
inline constexpr std::string_view kManifestTable = "_manifests";
inline constexpr std::string_view kEventsTable = "events";
inline constexpr std::string_view kFeedbackTable = "feedback";

struct SnapshotManifest {
  std::string source_id;
  std::int64_t snapshot_id = 0;
  std::size_t row_count = 0;          // valid input rows
  std::size_t quarantined_count = 0;  // row_count + quarantined_count = input rows
  std::size_t duplicate_count = 0;    // valid rows superseded or deduplicated
  std::int64_t ingested_at = 0;       // caller-supplied clock
  std::uint64_t content_digest = 0;   // FNV-1a 64 of the file bytes
  std::vector<std::string> warnings;
  // Not persisted: set when the call found this snapshot already ingested
  // with the same digest and wrote nothing.
  bool no_op = false;

  friend bool operator==(const SnapshotManifest& a, const SnapshotManifest& b) {
    return a.source_id == b.source_id && a.snapshot_id == b.snapshot_id && a.row_count == b.row_count &&
           a.quarantined_count == b.quarantined_count && a.duplicate_count == b.duplicate_count &&
           a.ingested_at == b.ingested_at && a.content_digest == b.content_digest && a.warnings == b.warnings;
  }
};

struct ImportOptions {
  std::string source_id;  // defaults to the destination table
  std::string table;      // defaults per importer
  std::int64_t ingested_at = 0;
};

// Snapshot rules per source: re-importing a stored snapshot with the same
// digest is a no-op; with a different digest, or with a snapshot id not
// above the newest one, it throws InvalidArgument. A fatal error (missing
// header, unreadable file) writes nothing.
SnapshotManifest import_table(storage::RawStore& store, const std::filesystem::path& path,
                              const catalog::TableSchema& schema, std::int64_t snapshot_id, ImportOptions options = {});

// One JSON object per line: student_id, ts (ISO-8601), kind, payload (object
// of strings, optional). Stored under "<student_id>|<ts>|<line>" where <ts>
// is 16 hex digits ordering like the signed epoch milliseconds.
SnapshotManifest import_events(storage::RawStore& store, const std::filesystem::path& path, std::int64_t snapshot_id,
                               ImportOptions options = {});

// Columns student_id,q1,q2,q3 and optionally collected_at. A respondent absent
// from `marks_table` is stored with f:orphan = 1; all-empty answers with
// f:zero_length = 1.
SnapshotManifest import_feedback(storage::RawStore& store, const std::filesystem::path& path,
                                 std::int64_t snapshot_id, ImportOptions options = {},
                                 std::string_view marks_table = "marks");

std::optional<SnapshotManifest> find_manifest(const storage::RawStore& store, std::string_view source_id,
                                              std::int64_t snapshot_id);
std::vector<SnapshotManifest> manifests(const storage::RawStore& store, std::string_view source_id);

std::string event_row_key(std::string_view student_id, std::int64_t epoch_ms, std::size_t seq);

// Readers for downstream stages.
std::vector<catalog::StudentRecord> read_student_records(const storage::RawStore& store,
                                                         std::string_view table = "marks");
std::vector<catalog::FeedbackDocument> read_feedback(const storage::RawStore& store,
                                                     std::string_view table = kFeedbackTable);

// ---------------------------------------------------------------------------
// Scheduler
// ---------------------------------------------------------------------------

enum class SourceKind { Table, Events, Feedback };

SourceKind parse_source_kind(std::string_view text);
std::string_view to_string(SourceKind kind);

struct ScheduleEntry {
  std::string source_id;
  SourceKind kind = SourceKind::Table;
  std::string pattern;  // glob over file names; directory part is literal
  std::int64_t interval = 1;
  std::string schema_path;  // table sources only
};

// Lines "<source_id> <kind> <glob> <interval> [schema]"; '#' comments.
// Relative paths resolve against `base_dir`.
std::vector<ScheduleEntry> parse_schedule(std::string_view text, const std::filesystem::path& base_dir = {});

struct TickReport {
  std::int64_t time = 0;
  std::vector<SnapshotManifest> imported;  // in source order, then file name order
  std::size_t skipped = 0;                 // matching files whose digest was already ingested
};

// Polls each source on its interval against a caller-driven virtual clock.
// A source is due at t = 0, interval, 2*interval, ... Every new file
// (unseen digest) becomes the source's next snapshot. Distinct sources
// import in parallel; one source never runs two imports at once.
class Scheduler {
 public:
  Scheduler(storage::RawStore& store, std::vector<ScheduleEntry> entries, std::size_t workers = 1);

  // Runs every source due at `now`.
  TickReport tick(std::int64_t now);

  // Ticks at every due time in [from, to].
  std::vector<TickReport> run(std::int64_t from, std::int64_t to);

  [[nodiscard]] const std::vector<ScheduleEntry>& entries() const { return entries_; }

 private:
  std::vector<SnapshotManifest> poll(std::size_t index, std::int64_t now, std::size_t& skipped);

  storage::RawStore& store_;
  std::vector<ScheduleEntry> entries_;
  std::vector<catalog::TableSchema> schemas_;
  std::vector<std::unique_ptr<std::mutex>> locks_;
  std::size_t workers_;
};

bool glob_match(std::string_view pattern, std::string_view name);

}  // namespace lak::ingest
