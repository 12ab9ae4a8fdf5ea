#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lak::catalog {

enum class ValueKind { Numeric, Text, Boolean, Categorical, Timestamp };

std::string_view to_string(ValueKind kind);
ValueKind parse_value_kind(std::string_view text);

struct FieldSchema {
  std::string name;
  ValueKind kind = ValueKind::Text;
  std::optional<double> min;  // numeric fields only
  std::optional<double> max;

  friend bool operator==(const FieldSchema&, const FieldSchema&) = default;
};

// Line-oriented, versioned table schema:
//
//   lak-schema 1
//   table <name>
//   key <field>
//   <name>:<kind>:<min>:<max>     one per field, min/max may be empty
//
// Blank lines and lines starting with '#' are ignored.
struct TableSchema {
  static constexpr int kVersion = 1;

  std::string table;
  std::string key = "student_id";
  std::vector<FieldSchema> fields;

  [[nodiscard]] const FieldSchema* find(std::string_view name) const;
  [[nodiscard]] std::vector<std::string> field_names() const;

  // Checks one textual cell against its field. Empty string when valid,
  // otherwise a reason such as "quiz_5 exceeds 5".
  [[nodiscard]] std::string check_value(const FieldSchema& field, std::string_view value) const;

  friend bool operator==(const TableSchema&, const TableSchema&) = default;
};

TableSchema parse_schema(std::string_view text);
TableSchema load_schema(const std::string& path);
std::string serialize_schema(const TableSchema& schema);

// Compact decimal rendering used in messages and text files ("5", "0.25").
std::string format_number(double v);

}  // namespace lak::catalog
