#include "lak/raw_store.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "binio.hpp"
#include "lak/error.hpp"
#include "lak/hash.hpp"

namespace lak::storage {
namespace {

constexpr std::string_view kLogMagic = "LRS1";

using Versions = std::vector<Cell>;
using RowCells = std::map<std::string, Versions, std::less<>>;
using Table = std::map<std::string, RowCells, std::less<>>;

void check_table_name(std::string_view table) {
  if (table.empty() || table.front() == '.') throw InvalidArgument("invalid table name '" + std::string(table) + "'");
  for (char c : table) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) throw InvalidArgument("invalid table name '" + std::string(table) + "'");
  }
}

void check_qualifier(std::string_view q) {
  const auto colon = q.find(':');
  if (colon == 0 || colon == std::string_view::npos) {
    throw InvalidArgument("qualifier '" + std::string(q) + "' is not of the form family:qualifier");
  }
}

std::string encode_batch(const std::vector<RowWrite>& rows) {
  std::string payload;
  detail::ByteWriter w(payload);
  w.u32(static_cast<std::uint32_t>(rows.size()));
  for (const auto& row : rows) {
    w.str(row.row_key);
    w.u32(static_cast<std::uint32_t>(row.cells.size()));
    for (const auto& c : row.cells) {
      w.str(c.qualifier);
      w.str(c.value);
      w.i64(c.ts);
    }
  }
  std::string record;
  detail::ByteWriter rw(record);
  rw.u32(static_cast<std::uint32_t>(payload.size()));
  rw.bytes(payload);
  rw.u64(fnv1a64(payload));
  return record;
}

std::vector<RowWrite> decode_payload(std::string_view payload) {
  detail::ByteReader r(payload, "raw-store batch");
  std::vector<RowWrite> rows(r.u32());
  for (auto& row : rows) {
    row.row_key = r.str();
    row.cells.resize(r.u32());
    for (auto& c : row.cells) {
      c.qualifier = r.str();
      c.value = r.str();
      c.ts = r.i64();
    }
  }
  if (!r.done()) throw CorruptFileError("trailing bytes in raw-store batch");
  return rows;
}

void apply_batch(Table& table, const std::vector<RowWrite>& rows) {
  for (const auto& row : rows) {
    auto& cells = table[row.row_key];
    for (const auto& c : row.cells) cells[c.qualifier].push_back({c.value, c.ts});
  }
}

RawRow latest(std::string_view table, const std::string& key, const RowCells& cells) {
  RawRow row;
  row.table = std::string(table);
  row.row_key = key;
  for (const auto& [q, versions] : cells) {
    if (!versions.empty()) row.cells.emplace(q, versions.back());
  }
  return row;
}

}  // namespace

const std::string* RawRow::value(std::string_view qualifier) const {
  const auto it = cells.find(qualifier);
  return it == cells.end() ? nullptr : &it->second.value;
}

struct RawStore::Impl {
  std::filesystem::path dir;
  mutable std::shared_mutex mu;
  std::map<std::string, Table, std::less<>> tables;

  [[nodiscard]] std::filesystem::path log_path(std::string_view table) const {
    return dir / (std::string(table) + ".log");
  }

  const Table& table(std::string_view name) const {
    const auto it = tables.find(name);
    if (it == tables.end()) throw NotFoundError("unknown table '" + std::string(name) + "'");
    return it->second;
  }

  void load_table(const std::filesystem::path& path, const std::string& name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open table log '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    if (data.size() < kLogMagic.size() || std::string_view(data).substr(0, 4) != kLogMagic) {
      throw CorruptFileError("table log '" + path.string() + "' has a bad header");
    }
    Table& t = tables[name];
    std::size_t pos = kLogMagic.size();
    while (pos < data.size()) {
      // A record cut short by a crash is dropped; a complete record with a
      // bad checksum is corruption.
      if (data.size() - pos < 4) break;
      detail::ByteReader hdr(std::string_view(data).substr(pos, 4));
      const std::uint32_t len = hdr.u32();
      if (data.size() - pos - 4 < static_cast<std::size_t>(len) + 8) break;
      const std::string_view payload = std::string_view(data).substr(pos + 4, len);
      detail::ByteReader tail(std::string_view(data).substr(pos + 4 + len, 8));
      if (tail.u64() != fnv1a64(payload)) {
        throw CorruptFileError("checksum mismatch in table log '" + path.string() + "' at offset " +
                               std::to_string(pos));
      }
      apply_batch(t, decode_payload(payload));
      pos += 4 + len + 8;
    }
    if (pos < data.size()) std::filesystem::resize_file(path, pos);
  }
};

RawStore::RawStore() : impl_(std::make_unique<Impl>()) {}

RawStore::RawStore(std::filesystem::path dir) : impl_(std::make_unique<Impl>()) {
  impl_->dir = std::move(dir);
  std::filesystem::create_directories(impl_->dir);
  std::vector<std::filesystem::path> logs;
  for (const auto& entry : std::filesystem::directory_iterator(impl_->dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".log") logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto& p : logs) impl_->load_table(p, p.stem().string());
}

RawStore::~RawStore() = default;
RawStore::RawStore(RawStore&&) noexcept = default;
RawStore& RawStore::operator=(RawStore&&) noexcept = default;

void RawStore::create_table(std::string_view table) {
  check_table_name(table);
  std::unique_lock lock(impl_->mu);
  if (impl_->tables.contains(table)) return;
  if (!impl_->dir.empty()) {
    const auto path = impl_->log_path(table);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(kLogMagic.data(), static_cast<std::streamsize>(kLogMagic.size()));
    if (!out) throw IoError("cannot create table log '" + path.string() + "'");
  }
  impl_->tables.emplace(std::string(table), Table{});
}

bool RawStore::has_table(std::string_view table) const {
  std::shared_lock lock(impl_->mu);
  return impl_->tables.contains(table);
}

std::vector<std::string> RawStore::tables() const {
  std::shared_lock lock(impl_->mu);
  std::vector<std::string> out;
  for (const auto& [name, _] : impl_->tables) out.push_back(name);
  return out;
}

void RawStore::put_row(std::string_view table, std::string_view row_key, std::vector<CellWrite> cells) {
  std::vector<RowWrite> rows(1);
  rows[0].row_key = std::string(row_key);
  rows[0].cells = std::move(cells);
  put_rows(table, std::move(rows));
}

void RawStore::put_rows(std::string_view table, std::vector<RowWrite> rows) {
  std::unique_lock lock(impl_->mu);
  const auto it = impl_->tables.find(table);
  if (it == impl_->tables.end()) throw NotFoundError("unknown table '" + std::string(table) + "'");
  if (rows.empty()) return;

  // Validate the whole batch before touching disk or memory.
  std::map<std::pair<std::string_view, std::string_view>, Timestamp> pending;
  for (const auto& row : rows) {
    if (row.row_key.empty()) throw InvalidArgument("empty row key");
    for (const auto& c : row.cells) {
      check_qualifier(c.qualifier);
      const auto key = std::pair<std::string_view, std::string_view>(row.row_key, c.qualifier);
      Timestamp floor = std::numeric_limits<Timestamp>::min();
      if (const auto p = pending.find(key); p != pending.end()) {
        floor = p->second;
      } else if (const auto r = it->second.find(row.row_key); r != it->second.end()) {
        if (const auto q = r->second.find(c.qualifier); q != r->second.end() && !q->second.empty()) {
          floor = q->second.back().ts;
        }
      }
      if (c.ts < floor) {
        throw InvalidArgument("timestamp " + std::to_string(c.ts) + " for " + row.row_key + "/" + c.qualifier +
                              " is older than the current version (" + std::to_string(floor) + ")");
      }
      pending[key] = c.ts;
    }
  }

  if (!impl_->dir.empty()) {
    const std::string record = encode_batch(rows);
    std::ofstream out(impl_->log_path(table), std::ios::binary | std::ios::app);
    out.write(record.data(), static_cast<std::streamsize>(record.size()));
    out.flush();
    if (!out) throw IoError("failed to append to table log '" + impl_->log_path(table).string() + "'");
  }
  apply_batch(it->second, rows);
}

std::optional<RawRow> RawStore::get_row(std::string_view table, std::string_view row_key) const {
  std::shared_lock lock(impl_->mu);
  const Table& t = impl_->table(table);
  const auto it = t.find(row_key);
  if (it == t.end()) return std::nullopt;
  return latest(table, it->first, it->second);
}

std::optional<Cell> RawStore::get_cell(std::string_view table, std::string_view row_key, std::string_view qualifier,
                                       std::optional<Timestamp> as_of) const {
  std::shared_lock lock(impl_->mu);
  const Table& t = impl_->table(table);
  const auto r = t.find(row_key);
  if (r == t.end()) return std::nullopt;
  const auto q = r->second.find(qualifier);
  if (q == r->second.end()) return std::nullopt;
  for (auto v = q->second.rbegin(); v != q->second.rend(); ++v) {
    if (!as_of || v->ts <= *as_of) return *v;
  }
  return std::nullopt;
}

std::vector<Cell> RawStore::cell_versions(std::string_view table, std::string_view row_key,
                                          std::string_view qualifier) const {
  std::shared_lock lock(impl_->mu);
  const Table& t = impl_->table(table);
  const auto r = t.find(row_key);
  if (r == t.end()) return {};
  const auto q = r->second.find(qualifier);
  if (q == r->second.end()) return {};
  return q->second;
}

RowScanner RawStore::scan_range(std::string_view table, std::string_view start_key, std::string_view end_key) const {
  if (start_key > end_key) throw InvalidArgument("scan start key is after end key");
  std::shared_lock lock(impl_->mu);
  const Table& t = impl_->table(table);
  std::vector<RawRow> rows;
  for (auto it = t.lower_bound(start_key); it != t.end() && std::string_view(it->first) < end_key; ++it) {
    rows.push_back(latest(table, it->first, it->second));
  }
  return RowScanner(std::move(rows));
}

RowScanner RawStore::scan_prefix(std::string_view table, std::string_view prefix) const {
  std::shared_lock lock(impl_->mu);
  const Table& t = impl_->table(table);
  std::vector<RawRow> rows;
  for (auto it = t.lower_bound(prefix); it != t.end() && std::string_view(it->first).starts_with(prefix); ++it) {
    rows.push_back(latest(table, it->first, it->second));
  }
  return RowScanner(std::move(rows));
}

RowScanner RawStore::scan_all(std::string_view table) const {
  std::shared_lock lock(impl_->mu);
  const Table& t = impl_->table(table);
  std::vector<RawRow> rows;
  rows.reserve(t.size());
  for (const auto& [key, cells] : t) rows.push_back(latest(table, key, cells));
  return RowScanner(std::move(rows));
}

std::size_t RawStore::row_count(std::string_view table) const {
  std::shared_lock lock(impl_->mu);
  return impl_->table(table).size();
}

const std::filesystem::path& RawStore::directory() const { return impl_->dir; }

bool RawStore::persistent() const { return !impl_->dir.empty(); }

}  // namespace lak::storage
