#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lak {

// ISO-8601 date-time: YYYY-MM-DD[THH:MM[:SS[.fff]]][Z|+HH:MM|-HH:MM].
// A space may replace 'T'. Missing offset means UTC. Returns epoch
// milliseconds, or nullopt if the text does not parse.
std::optional<std::int64_t> parse_iso8601_ms(std::string_view text);

// Canonical UTC rendering "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_iso8601_ms(std::int64_t epoch_ms);

}  // namespace lak
