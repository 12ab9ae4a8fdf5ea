#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lak::storage {

// Caller-supplied logical time, never wall clock.
using Timestamp = std::int64_t;

struct Cell {
  std::string value;
  Timestamp ts = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct CellWrite {
  std::string qualifier;  // "family:qualifier"
  std::string value;
  Timestamp ts = 0;
};

struct RowWrite {
  std::string row_key;
  std::vector<CellWrite> cells;
};

// Latest version of every qualifier written to a row.
struct RawRow {
  std::string table;
  std::string row_key;
  std::map<std::string, Cell, std::less<>> cells;

  [[nodiscard]] const std::string* value(std::string_view qualifier) const;
  friend bool operator==(const RawRow&, const RawRow&) = default;
};

// Materialized, ordered result of a scan. Later writes to the store do not
// show up in a scanner that already exists.
class RowScanner {
 public:
  explicit RowScanner(std::vector<RawRow> rows) : rows_(std::move(rows)) {}

  [[nodiscard]] auto begin() const { return rows_.begin(); }
  [[nodiscard]] auto end() const { return rows_.end(); }
  [[nodiscard]] std::size_t size() const { return rows_.size(); }
  [[nodiscard]] bool empty() const { return rows_.empty(); }
  [[nodiscard]] const std::vector<RawRow>& rows() const& { return rows_; }
  [[nodiscard]] std::vector<RawRow> rows() && { return std::move(rows_); }

 private:
  std::vector<RawRow> rows_;
};

// Key-value row store. Each table is an append-only log file
// `<dir>/<table>.log`; the in-memory key index is rebuilt on open. One
// put_rows call is one framed, checksummed log record, so a crash leaves
// either all or none of it. A store constructed without a directory lives
// only in memory.
//
// Thread safety: any number of concurrent readers; writers serialize.
class RawStore {
 public:
  RawStore();
  explicit RawStore(std::filesystem::path dir);
  ~RawStore();
  RawStore(RawStore&&) noexcept;
  RawStore& operator=(RawStore&&) noexcept;

  // Idempotent.
  void create_table(std::string_view table);
  [[nodiscard]] bool has_table(std::string_view table) const;
  [[nodiscard]] std::vector<std::string> tables() const;

  // Cell timestamps must not decrease per qualifier; violations throw
  // InvalidArgument and nothing from the call is written.
  void put_row(std::string_view table, std::string_view row_key, std::vector<CellWrite> cells);
  void put_rows(std::string_view table, std::vector<RowWrite> rows);

  [[nodiscard]] std::optional<RawRow> get_row(std::string_view table, std::string_view row_key) const;

  // Newest version with ts <= as_of (or newest overall).
  [[nodiscard]] std::optional<Cell> get_cell(std::string_view table, std::string_view row_key,
                                             std::string_view qualifier,
                                             std::optional<Timestamp> as_of = std::nullopt) const;
  [[nodiscard]] std::vector<Cell> cell_versions(std::string_view table, std::string_view row_key,
                                                std::string_view qualifier) const;

  // Rows with start_key <= key < end_key, in lexicographic key order.
  [[nodiscard]] RowScanner scan_range(std::string_view table, std::string_view start_key,
                                      std::string_view end_key) const;
  [[nodiscard]] RowScanner scan_prefix(std::string_view table, std::string_view prefix) const;
  [[nodiscard]] RowScanner scan_all(std::string_view table) const;

  [[nodiscard]] std::size_t row_count(std::string_view table) const;

  [[nodiscard]] const std::filesystem::path& directory() const;
  [[nodiscard]] bool persistent() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace lak::storage
