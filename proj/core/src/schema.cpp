#include "lak/schema.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lak/error.hpp"
#include "lak/timeutil.hpp"

namespace lak::catalog {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::Numeric: return "numeric";
    case ValueKind::Text: return "text";
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Categorical: return "categorical";
    case ValueKind::Timestamp: return "timestamp";
  }
  return "?";
}

ValueKind parse_value_kind(std::string_view text) {
  if (text == "numeric") return ValueKind::Numeric;
  if (text == "text") return ValueKind::Text;
  if (text == "boolean") return ValueKind::Boolean;
  if (text == "categorical") return ValueKind::Categorical;
  if (text == "timestamp") return ValueKind::Timestamp;
  throw ConfigError("unknown value kind '" + std::string(text) + "'");
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

const FieldSchema* TableSchema::find(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::vector<std::string> TableSchema::field_names() const {
  std::vector<std::string> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(f.name);
  return out;
}

std::string TableSchema::check_value(const FieldSchema& field, std::string_view value) const {
  const std::string_view v = trim(value);
  if (field.name == key && v.empty()) return field.name + " is empty";
  switch (field.kind) {
    case ValueKind::Numeric: {
      const auto d = parse_double(v);
      if (!d || !std::isfinite(*d)) return field.name + " is not a number: '" + std::string(v) + "'";
      if (field.min && *d < *field.min) return field.name + " is below " + format_number(*field.min);
      if (field.max && *d > *field.max) return field.name + " exceeds " + format_number(*field.max);
      return {};
    }
    case ValueKind::Boolean:
      if (v == "0" || v == "1" || v == "true" || v == "false") return {};
      return field.name + " is not boolean: '" + std::string(v) + "'";
    case ValueKind::Timestamp:
      if (v.empty() || parse_iso8601_ms(v)) return {};
      return field.name + " is not an ISO-8601 timestamp: '" + std::string(v) + "'";
    case ValueKind::Categorical:
    case ValueKind::Text:
      return {};
  }
  return {};
}

TableSchema parse_schema(std::string_view text) {
  TableSchema schema;
  bool saw_version = false;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      return ConfigError("schema line " + std::to_string(line_no) + ": " + why);
    };
    if (!saw_version) {
      if (!line.starts_with("lak-schema ")) throw fail("expected 'lak-schema <version>' header");
      const auto version = parse_double(line.substr(11));
      if (!version || *version != TableSchema::kVersion) {
        throw VersionError("unsupported schema version '" + std::string(line.substr(11)) + "'");
      }
      saw_version = true;
      continue;
    }
    if (line.starts_with("table ")) {
      schema.table = std::string(trim(line.substr(6)));
      continue;
    }
    if (line.starts_with("key ")) {
      schema.key = std::string(trim(line.substr(4)));
      continue;
    }
    const auto parts = split(line, ':');
    if (parts.size() != 4) throw fail("expected name:kind:min:max");
    FieldSchema f;
    f.name = std::string(trim(parts[0]));
    if (f.name.empty()) throw fail("empty field name");
    f.kind = parse_value_kind(trim(parts[1]));
    if (!trim(parts[2]).empty()) {
      f.min = parse_double(parts[2]);
      if (!f.min) throw fail("bad min '" + std::string(parts[2]) + "'");
    }
    if (!trim(parts[3]).empty()) {
      f.max = parse_double(parts[3]);
      if (!f.max) throw fail("bad max '" + std::string(parts[3]) + "'");
    }
    if (f.min && f.max && *f.min > *f.max) throw fail("min exceeds max");
    if (!seen.insert(f.name).second) throw fail("duplicate field '" + f.name + "'");
    schema.fields.push_back(std::move(f));
  }
  if (!saw_version) throw ConfigError("schema is missing the 'lak-schema' header");
  if (!schema.find(schema.key)) throw ConfigError("schema key field '" + schema.key + "' is not declared");
  return schema;
}

TableSchema load_schema(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open schema file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

std::string serialize_schema(const TableSchema& schema) {
  std::string out = "lak-schema " + std::to_string(TableSchema::kVersion) + "\n";
  if (!schema.table.empty()) out += "table " + schema.table + "\n";
  out += "key " + schema.key + "\n";
  for (const auto& f : schema.fields) {
    out += f.name;
    out += ':';
    out += to_string(f.kind);
    out += ':';
    if (f.min) out += format_number(*f.min);
    out += ':';
    if (f.max) out += format_number(*f.max);
    out += '\n';
  }
  return out;
}

}  // namespace lak::catalog
