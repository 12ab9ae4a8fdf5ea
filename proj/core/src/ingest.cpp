#include "lak/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "lak/csv.hpp"
#include "lak/error.hpp"
#include "lak/fileio.hpp"
#include "lak/hash.hpp"
#include "lak/timeutil.hpp"

namespace lak::ingest {
namespace {

using storage::CellWrite;
using storage::RawStore;
using storage::RowWrite;

std::string padded(std::int64_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*lld", width, static_cast<long long>(v));
  return buf;
}

std::string manifest_key(std::string_view source, std::int64_t snapshot) {
  return std::string(source) + "/" + padded(snapshot, 20);
}

std::string quarantine_key(std::int64_t snapshot, std::size_t line) {
  return padded(snapshot, 20) + "/" + padded(static_cast<std::int64_t>(line), 10);
}

std::string trimmed(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

bool blank_record(const csv::Record& r) { return r.raw.empty() && r.fields.size() == 1 && r.fields[0].empty(); }

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw CorruptFileError("manifest field '" + s + "' is not an integer");
  return v;
}

SnapshotManifest manifest_from_row(const storage::RawRow& row) {
  auto get = [&](std::string_view q) -> const std::string& {
    const std::string* v = row.value(q);
    if (!v) throw CorruptFileError("manifest " + row.row_key + " lacks " + std::string(q));
    return *v;
  };
  SnapshotManifest m;
  m.source_id = get("m:source_id");
  m.snapshot_id = std::stoll(get("m:snapshot_id"));
  m.row_count = parse_u64(get("m:row_count"));
  m.quarantined_count = parse_u64(get("m:quarantined_count"));
  m.duplicate_count = parse_u64(get("m:duplicate_count"));
  m.ingested_at = std::stoll(get("m:ingested_at"));
  m.content_digest = from_hex(get("m:content_digest"));
  m.warnings = nlohmann::json::parse(get("m:warnings")).get<std::vector<std::string>>();
  return m;
}

std::vector<CellWrite> manifest_cells(const SnapshotManifest& m) {
  const auto ts = m.snapshot_id;
  return {{"m:source_id", m.source_id, ts},
          {"m:snapshot_id", std::to_string(m.snapshot_id), ts},
          {"m:row_count", std::to_string(m.row_count), ts},
          {"m:quarantined_count", std::to_string(m.quarantined_count), ts},
          {"m:duplicate_count", std::to_string(m.duplicate_count), ts},
          {"m:ingested_at", std::to_string(m.ingested_at), ts},
          {"m:content_digest", to_hex(m.content_digest), ts},
          {"m:warnings", nlohmann::json(m.warnings).dump(), ts}};
}

// Rows staged by an importer; nothing reaches the store until commit().
struct Staging {
  std::string table;
  std::vector<RowWrite> rows;
  std::vector<RowWrite> quarantine;
  SnapshotManifest manifest;

  void reject(std::size_t line, const std::string& raw, const std::string& reason) {
    const auto ts = manifest.snapshot_id;
    quarantine.push_back({quarantine_key(ts, line),
                          {{"q:line", std::to_string(line), ts}, {"q:raw", raw, ts}, {"q:reason", reason, ts}}});
    ++manifest.quarantined_count;
  }
};

// Returns the stored manifest when this exact snapshot was already ingested,
// and throws when the snapshot would go backwards or change content.
std::optional<SnapshotManifest> check_snapshot(const RawStore& store, const std::string& source,
                                               std::int64_t snapshot, std::uint64_t digest) {
  if (snapshot < 0) throw InvalidArgument("snapshot id must be non-negative, got " + std::to_string(snapshot));
  if (auto existing = find_manifest(store, source, snapshot)) {
    if (existing->content_digest != digest) {
      throw InvalidArgument("snapshot " + std::to_string(snapshot) + " of source '" + source +
                            "' was already ingested with different content");
    }
    existing->no_op = true;
    return existing;
  }
  const auto all = manifests(store, source);
  if (!all.empty() && all.back().snapshot_id >= snapshot) {
    throw InvalidArgument("snapshot " + std::to_string(snapshot) + " of source '" + source +
                          "' is not newer than stored snapshot " + std::to_string(all.back().snapshot_id));
  }
  return std::nullopt;
}

SnapshotManifest commit(RawStore& store, Staging& s) {
  // Data first, manifest last: a snapshot counts as ingested only once its
  // manifest row exists.
  store.create_table(s.table);
  store.create_table(s.table + "_quarantine");
  store.create_table(kManifestTable);
  if (!s.rows.empty()) store.put_rows(s.table, std::move(s.rows));
  if (!s.quarantine.empty()) store.put_rows(s.table + "_quarantine", std::move(s.quarantine));
  store.put_row(kManifestTable, manifest_key(s.manifest.source_id, s.manifest.snapshot_id),
                manifest_cells(s.manifest));
  return s.manifest;
}

Staging begin(const ImportOptions& options, std::string_view default_table, std::int64_t snapshot,
              std::uint64_t digest) {
  Staging s;
  s.table = options.table.empty() ? std::string(default_table) : options.table;
  s.manifest.source_id = options.source_id.empty() ? s.table : options.source_id;
  s.manifest.snapshot_id = snapshot;
  s.manifest.ingested_at = options.ingested_at;
  s.manifest.content_digest = digest;
  return s;
}

std::map<std::string, std::size_t> header_index(const csv::Record& header, const std::filesystem::path& path) {
  if (!header.error.empty()) throw InvalidArgument(path.string() + ": malformed header: " + header.error);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.fields.size(); ++i) {
    const std::string name = trimmed(header.fields[i]);
    if (!index.emplace(name, i).second) throw InvalidArgument(path.string() + ": duplicate header column '" + name + "'");
  }
  return index;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

std::optional<SnapshotManifest> find_manifest(const RawStore& store, std::string_view source_id,
                                              std::int64_t snapshot_id) {
  if (!store.has_table(kManifestTable)) return std::nullopt;
  const auto row = store.get_row(kManifestTable, manifest_key(source_id, snapshot_id));
  if (!row) return std::nullopt;
  return manifest_from_row(*row);
}

std::vector<SnapshotManifest> manifests(const RawStore& store, std::string_view source_id) {
  std::vector<SnapshotManifest> out;
  if (!store.has_table(kManifestTable)) return out;
  for (const auto& row : store.scan_prefix(kManifestTable, std::string(source_id) + "/")) {
    out.push_back(manifest_from_row(row));
  }
  return out;
}

std::string event_row_key(std::string_view student_id, std::int64_t epoch_ms, std::size_t seq) {
  const auto biased = static_cast<std::uint64_t>(epoch_ms) ^ (std::uint64_t{1} << 63);
  return std::string(student_id) + "|" + to_hex(biased) + "|" + padded(static_cast<std::int64_t>(seq), 10);
}

SnapshotManifest import_table(RawStore& store, const std::filesystem::path& path, const catalog::TableSchema& schema,
                              std::int64_t snapshot_id, ImportOptions options) {
  const std::string text = read_text_file(path);
  const std::uint64_t digest = fnv1a64(text);
  Staging s = begin(options, schema.table, snapshot_id, digest);
  if (auto done = check_snapshot(store, s.manifest.source_id, snapshot_id, digest)) return *done;

  const auto records = csv::parse(text);
  if (records.empty() || blank_record(records.front())) throw InvalidArgument(path.string() + ": missing header");
  const auto index = header_index(records.front(), path);
  std::vector<std::string> missing, extra;
  for (const auto& f : schema.fields) {
    if (!index.contains(f.name)) missing.push_back(f.name);
  }
  for (const auto& [name, i] : index) {
    if (!schema.find(name)) extra.push_back(name);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string why = path.string() + ": header does not match schema '" + schema.table + "'";
    if (!missing.empty()) why += "; missing " + join(missing);
    if (!extra.empty()) why += "; unexpected " + join(extra);
    throw InvalidArgument(why);
  }
  const std::size_t key_col = index.at(schema.key);
  const std::size_t width = records.front().fields.size();

  std::map<std::string, std::size_t> row_of_key;  // key -> position in s.rows
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (blank_record(rec)) continue;
    if (!rec.error.empty()) {
      s.reject(rec.line, rec.raw, rec.error);
      continue;
    }
    if (rec.fields.size() != width) {
      s.reject(rec.line, rec.raw,
               "expected " + std::to_string(width) + " fields, got " + std::to_string(rec.fields.size()));
      continue;
    }
    std::string reason;
    for (const auto& f : schema.fields) {
      reason = schema.check_value(f, rec.fields[index.at(f.name)]);
      if (!reason.empty()) break;
    }
    if (!reason.empty()) {
      s.reject(rec.line, rec.raw, reason);
      continue;
    }
    ++s.manifest.row_count;
    RowWrite row{trimmed(rec.fields[key_col]), {}};
    for (const auto& f : schema.fields) {
      if (f.name == schema.key) continue;
      row.cells.push_back({"d:" + f.name, trimmed(rec.fields[index.at(f.name)]), snapshot_id});
    }
    if (const auto it = row_of_key.find(row.row_key); it != row_of_key.end()) {
      ++s.manifest.duplicate_count;
      s.manifest.warnings.push_back("line " + std::to_string(rec.line) + ": duplicate " + schema.key + " '" +
                                    row.row_key + "' replaces an earlier row");
      s.rows[it->second] = std::move(row);
    } else {
      row_of_key.emplace(row.row_key, s.rows.size());
      s.rows.push_back(std::move(row));
    }
  }
  return commit(store, s);
}

SnapshotManifest import_events(RawStore& store, const std::filesystem::path& path, std::int64_t snapshot_id,
                               ImportOptions options) {
  const std::string text = read_text_file(path);
  const std::uint64_t digest = fnv1a64(text);
  Staging s = begin(options, kEventsTable, snapshot_id, digest);
  if (auto done = check_snapshot(store, s.manifest.source_id, snapshot_id, digest)) return *done;

  std::unordered_set<std::uint64_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string::npos ? text.size() : nl;
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trimmed(line).empty()) continue;

    const std::string raw(line);
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      s.reject(line_no, raw, "not a JSON object");
      continue;
    }
    auto text_field = [&](const char* name) -> std::optional<std::string> {
      const auto it = doc.find(name);
      if (it == doc.end() || !it->is_string()) return std::nullopt;
      return it->get<std::string>();
    };
    const auto student = text_field("student_id");
    const auto ts_text = text_field("ts");
    const auto kind = text_field("kind");
    if (!student || student->empty()) {
      s.reject(line_no, raw, "missing student_id");
      continue;
    }
    if (!kind || kind->empty()) {
      s.reject(line_no, raw, "missing kind");
      continue;
    }
    const auto ts = ts_text ? parse_iso8601_ms(*ts_text) : std::nullopt;
    if (!ts) {
      s.reject(line_no, raw, "missing or unparseable ts");
      continue;
    }
    std::map<std::string, std::string> payload;
    if (const auto it = doc.find("payload"); it != doc.end()) {
      bool ok = it->is_object();
      if (ok) {
        for (const auto& [k, v] : it->items()) {
          if (!v.is_string()) {
            ok = false;
            break;
          }
          payload.emplace(k, v.get<std::string>());
        }
      }
      if (!ok) {
        s.reject(line_no, raw, "payload is not an object of strings");
        continue;
      }
    }
    ++s.manifest.row_count;

    const std::string payload_text = nlohmann::json(payload).dump();
    Fnv1a64 h;
    for (const std::string* part : {&*student, &*kind, &payload_text}) {
      h.update_u64(part->size());
      h.update(*part);
    }
    h.update_u64(static_cast<std::uint64_t>(*ts));
    if (!seen.insert(h.digest()).second) {
      ++s.manifest.duplicate_count;
      continue;
    }
    s.rows.push_back({event_row_key(*student, *ts, line_no),
                      {{"e:kind", *kind, snapshot_id},
                       {"e:payload", payload_text, snapshot_id},
                       {"e:ts", format_iso8601_ms(*ts), snapshot_id}}});
  }
  return commit(store, s);
}

SnapshotManifest import_feedback(RawStore& store, const std::filesystem::path& path, std::int64_t snapshot_id,
                                 ImportOptions options, std::string_view marks_table) {
  const std::string text = read_text_file(path);
  const std::uint64_t digest = fnv1a64(text);
  Staging s = begin(options, kFeedbackTable, snapshot_id, digest);
  if (auto done = check_snapshot(store, s.manifest.source_id, snapshot_id, digest)) return *done;

  const auto records = csv::parse(text);
  if (records.empty() || blank_record(records.front())) throw InvalidArgument(path.string() + ": missing header");
  const auto index = header_index(records.front(), path);
  std::vector<std::string> missing;
  for (const char* col : {"student_id", "q1", "q2", "q3"}) {
    if (!index.contains(col)) missing.push_back(col);
  }
  if (!missing.empty()) throw InvalidArgument(path.string() + ": header lacks " + join(missing));
  std::vector<std::string> extra;
  for (const auto& [name, i] : index) {
    if (name != "student_id" && name != "q1" && name != "q2" && name != "q3" && name != "collected_at") {
      extra.push_back(name);
    }
  }
  if (!extra.empty()) throw InvalidArgument(path.string() + ": unexpected feedback columns " + join(extra));
  const std::size_t width = records.front().fields.size();
  const auto collected_col = index.find("collected_at");
  const bool have_marks = store.has_table(marks_table);

  std::map<std::string, std::size_t> row_of_key;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (blank_record(rec)) continue;
    if (!rec.error.empty()) {
      s.reject(rec.line, rec.raw, rec.error);
      continue;
    }
    if (rec.fields.size() != width) {
      s.reject(rec.line, rec.raw,
               "expected " + std::to_string(width) + " fields, got " + std::to_string(rec.fields.size()));
      continue;
    }
    const std::string id = trimmed(rec.fields[index.at("student_id")]);
    if (id.empty()) {
      s.reject(rec.line, rec.raw, "student_id is empty");
      continue;
    }
    std::string collected;
    if (collected_col != index.end()) {
      collected = trimmed(rec.fields[collected_col->second]);
      if (!collected.empty() && !parse_iso8601_ms(collected)) {
        s.reject(rec.line, rec.raw, "collected_at is not an ISO-8601 timestamp: '" + collected + "'");
        continue;
      }
    }
    ++s.manifest.row_count;
    const std::string& q1 = rec.fields[index.at("q1")];
    const std::string& q2 = rec.fields[index.at("q2")];
    const std::string& q3 = rec.fields[index.at("q3")];
    const bool zero_length = trimmed(q1).empty() && trimmed(q2).empty() && trimmed(q3).empty();
    const bool orphan = !have_marks || !store.get_row(marks_table, id).has_value();
    RowWrite row{id,
                 {{"f:collected_at", collected, snapshot_id},
                  {"f:orphan", orphan ? "1" : "0", snapshot_id},
                  {"f:q1", q1, snapshot_id},
                  {"f:q2", q2, snapshot_id},
                  {"f:q3", q3, snapshot_id},
                  {"f:zero_length", zero_length ? "1" : "0", snapshot_id}}};
    if (const auto it = row_of_key.find(id); it != row_of_key.end()) {
      ++s.manifest.duplicate_count;
      s.manifest.warnings.push_back("line " + std::to_string(rec.line) + ": duplicate student_id '" + id +
                                    "' replaces an earlier row");
      s.rows[it->second] = std::move(row);
    } else {
      row_of_key.emplace(id, s.rows.size());
      s.rows.push_back(std::move(row));
    }
  }
  return commit(store, s);
}

std::vector<catalog::StudentRecord> read_student_records(const RawStore& store, std::string_view table) {
  std::vector<catalog::StudentRecord> out;
  for (const auto& row : store.scan_all(table)) {
    std::map<std::string, std::string, std::less<>> fields;
    fields.emplace("student_id", row.row_key);
    for (const auto& [q, cell] : row.cells) {
      if (q.starts_with("d:")) fields.emplace(q.substr(2), cell.value);
    }
    out.push_back(catalog::record_from_fields(fields));
  }
  return out;
}

std::vector<catalog::FeedbackDocument> read_feedback(const RawStore& store, std::string_view table) {
  std::vector<catalog::FeedbackDocument> out;
  for (const auto& row : store.scan_all(table)) {
    catalog::FeedbackDocument doc;
    doc.student_id = row.row_key;
    for (std::size_t i = 0; i < 3; ++i) {
      if (const auto* v = row.value("f:q" + std::to_string(i + 1))) doc.answers[i] = *v;
    }
    if (const auto* v = row.value("f:collected_at")) doc.collected_at = *v;
    out.push_back(std::move(doc));
  }
  return out;
}

}  // namespace lak::ingest
