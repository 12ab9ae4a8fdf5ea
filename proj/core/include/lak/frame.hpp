#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lak/catalog.hpp"

// Immutable columnar frame files.
//
// Layout (all integers little-endian):
//
//   "LAF1"
//   chunk*                 one per column, back to back
//   footer
//   u32 footer_length      bytes of footer
//   "LAF1"
//
//   chunk  := u32 name_len, name, u8 kind (0 f64, 1 i64, 2 text), u64 rows,
//             null bitmap (ceil(rows/8) bytes, bit i%8 of byte i/8, 1 = null),
//             values (f64/i64: 8 bytes each; text: u32 len + bytes each)
//   footer := u32 chunk_count,
//             chunk_count x (u32 name_len, name, u8 kind,
//                            u64 offset, u64 length, u64 chunk_fnv1a64),
//             u64 total_rows,
//             u64 checksum     FNV-1a 64 over every chunk byte, in order
//
// Null slots hold 0 / the empty string in the value area.
namespace lak::storage {

enum class ColumnKind : std::uint8_t { Float64 = 0, Int64 = 1, Text = 2 };

std::string_view to_string(ColumnKind kind);

using ColumnValues = std::variant<std::vector<double>, std::vector<std::int64_t>, std::vector<std::string>>;

struct Column {
  std::string name;
  ColumnValues values;
  std::vector<std::uint8_t> nulls;  // empty, or one flag per row (1 = null)

  [[nodiscard]] ColumnKind kind() const { return static_cast<ColumnKind>(values.index()); }
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] bool is_null(std::size_t row) const { return !nulls.empty() && nulls[row] != 0; }

  [[nodiscard]] const std::vector<double>& f64() const { return std::get<std::vector<double>>(values); }
  [[nodiscard]] const std::vector<std::int64_t>& i64() const { return std::get<std::vector<std::int64_t>>(values); }
  [[nodiscard]] const std::vector<std::string>& text() const { return std::get<std::vector<std::string>>(values); }

  friend bool operator==(const Column&, const Column&) = default;
};

struct ColumnTable {
  std::vector<Column> columns;

  [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  [[nodiscard]] const Column* find(std::string_view name) const;
  [[nodiscard]] const Column& at(std::string_view name) const;
  [[nodiscard]] std::vector<std::string> names() const;

  friend bool operator==(const ColumnTable&, const ColumnTable&) = default;
};

struct ChunkInfo {
  std::string name;
  ColumnKind kind = ColumnKind::Float64;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::uint64_t checksum = 0;
};

struct FrameFooter {
  std::vector<ChunkInfo> chunks;
  std::uint64_t total_rows = 0;
  std::uint64_t checksum = 0;
  std::uint64_t file_size = 0;
};

// Byte accounting for reads; every byte fetched from the file is counted.
struct FrameReadStats {
  std::uint64_t bytes_read = 0;
  std::uint64_t file_size = 0;
};

std::string encode_frame(const ColumnTable& table);
void write_frame(const ColumnTable& table, const std::filesystem::path& path);

// Full read verifies the whole-file checksum; a projected read touches only
// the trailer, footer and the requested chunks and verifies those chunks'
// checksums. Throws CorruptFileError on any mismatch and NotFoundError,
// listing the available columns, for unknown projected names.
ColumnTable read_frame(const std::filesystem::path& path,
                       const std::optional<std::vector<std::string>>& projection = std::nullopt,
                       FrameReadStats* stats = nullptr);

FrameFooter read_footer(const std::filesystem::path& path);

// Labeled rows as a frame: optional text key column, one column per feature
// (categorical codes as i64, continuous as f64) and the target (f64).
ColumnTable labeled_frame(std::span<const catalog::FeatureDef> layout, std::string_view target_name,
                          std::span<const catalog::LabeledRow> rows, std::span<const std::string> keys = {},
                          std::string_view key_name = "student_id");

std::vector<catalog::LabeledRow> labeled_rows(const ColumnTable& table, std::span<const catalog::FeatureDef> layout,
                                              std::string_view target_name);

}  // namespace lak::storage
