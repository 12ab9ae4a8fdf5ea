#include "lak/csv.hpp"

namespace lak::csv {

std::vector<Record> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<Record> out;
  std::size_t pos = 0;
  std::size_t line = 1;
  const std::size_t n = text.size();

  while (pos < n) {
    Record rec;
    rec.line = line;
    const std::size_t start = pos;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool done = false;

    while (!done) {
      if (pos >= n) {
        if (in_quotes && rec.error.empty()) rec.error = "unterminated quoted field";
        rec.fields.push_back(std::move(field));
        rec.raw = std::string(text.substr(start, pos - start));
        break;
      }
      const char c = text[pos];
      if (in_quotes) {
        if (c == '"') {
          if (pos + 1 < n && text[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
          } else {
            in_quotes = false;
            ++pos;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++pos;
        }
        continue;
      }
      switch (c) {
        case ',':
          rec.fields.push_back(std::move(field));
          field.clear();
          field_was_quoted = false;
          ++pos;
          break;
        case '"':
          if (field.empty() && !field_was_quoted) {
            in_quotes = true;
            field_was_quoted = true;
          } else if (rec.error.empty()) {
            rec.error = "unexpected quote in field " + std::to_string(rec.fields.size() + 1);
          }
          ++pos;
          break;
        case '\r':
          if (pos + 1 < n && text[pos + 1] == '\n') {
            rec.fields.push_back(std::move(field));
            rec.raw = std::string(text.substr(start, pos - start));
            pos += 2;
            ++line;
            done = true;
          } else {
            field.push_back(c);
            ++pos;
          }
          break;
        case '\n':
          rec.fields.push_back(std::move(field));
          rec.raw = std::string(text.substr(start, pos - start));
          ++pos;
          ++line;
          done = true;
          break;
        default:
          if (field_was_quoted && rec.error.empty()) {
            rec.error = "text after closing quote in field " + std::to_string(rec.fields.size() + 1);
          }
          field.push_back(c);
          ++pos;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string quote(std::string_view field) {
  const bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                     (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += quote(fields[i]);
  }
  return out;
}

}  // namespace lak::csv
