#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// RFC-4180 delimited text: comma separator, double-quote quoting with ""
// escapes, CRLF or LF record terminators, embedded newlines inside quotes.
namespace lak::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based physical line the record starts on
  std::string raw;       // source text of the record, without terminator
  std::string error;     // non-empty when the record is malformed
};

// Splits the whole input. A UTF-8 BOM is skipped. Malformed records (stray or
// unterminated quotes) are returned with `error` set rather than thrown, so
// callers can quarantine them and keep going.
std::vector<Record> parse(std::string_view text);

std::string quote(std::string_view field);
std::string format_row(const std::vector<std::string>& fields);

}  // namespace lak::csv
