#include "lak/sizing.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "lak/error.hpp"

namespace lak::storage {

StoragePlan estimate_storage(std::uint64_t students, std::uint64_t bytes_per_student, std::uint64_t replication) {
  if (replication == 0) throw InvalidArgument("replication must be at least 1");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  if (students != 0 && bytes_per_student != 0) {
    if (students > kMax / bytes_per_student) throw InvalidArgument("storage estimate overflows 64 bits");
    total = students * bytes_per_student;
    if (total > kMax / replication) throw InvalidArgument("storage estimate overflows 64 bits");
    total *= replication;
  }
  return {students, bytes_per_student, replication, total};
}

std::string render(const StoragePlan& plan) {
  const double mb = static_cast<double>(plan.total_bytes) / static_cast<double>(kMiB);
  const double gb = mb / 1000.0;
  char mb_text[64];
  char gb_text[64];
  if (mb == std::floor(mb)) {
    std::snprintf(mb_text, sizeof mb_text, "%.0f", mb);
  } else {
    std::snprintf(mb_text, sizeof mb_text, "%.3f", mb);
  }
  if (gb >= 100.0) {
    std::snprintf(gb_text, sizeof gb_text, "%.0f", gb);
  } else {
    std::snprintf(gb_text, sizeof gb_text, "%.3g", gb);
  }
  return std::to_string(plan.total_bytes) + " bytes = " + mb_text + " MB (≈" + gb_text + " GB)";
}

}  // namespace lak::storage
