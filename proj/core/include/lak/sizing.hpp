#pragma once

#include <cstdint>
#include <string>

namespace lak::storage {

inline constexpr std::uint64_t kMiB = 1ULL << 20;

struct StoragePlan {
  std::uint64_t students = 0;
  std::uint64_t bytes_per_student = 0;
  std::uint64_t replication = 1;
  std::uint64_t total_bytes = 0;  // students * bytes_per_student * replication
};

// Exact product. Throws InvalidArgument for replication 0 or on overflow.
StoragePlan estimate_storage(std::uint64_t students, std::uint64_t bytes_per_student, std::uint64_t replication);

// "125829120000 bytes = 120000 MB (≈120 GB)". MB are 2^20 bytes and GB are
// 1000 MB, the convention of the usual "2MB x 60,000 students ≈ 120GB"
// back-of-envelope sizing.
std::string render(const StoragePlan& plan);

}  // namespace lak::storage
