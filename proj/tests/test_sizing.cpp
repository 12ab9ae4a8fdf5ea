#include <gtest/gtest.h>

#include "lak/error.hpp"
#include "lak/sizing.hpp"
#include "support/gen.hpp"

namespace {

using lak::storage::estimate_storage;
using lak::storage::kMiB;

TEST(Sizing, SixtyThousandStudents) {
  const auto plan = estimate_storage(60000, 2 * kMiB, 1);
  EXPECT_EQ(plan.total_bytes, 125829120000ULL);
  EXPECT_NE(lak::storage::render(plan).find("≈120 GB"), std::string::npos);
}

TEST(Sizing, ReplicationAndEdges) {
  EXPECT_EQ(estimate_storage(0, 2 * kMiB, 1).total_bytes, 0u);
  EXPECT_EQ(estimate_storage(60000, 2 * kMiB, 3).total_bytes / kMiB, 360000u);
  EXPECT_THROW((void)estimate_storage(1, 1, 0), lak::InvalidArgument);
  EXPECT_THROW((void)estimate_storage(1ULL << 40, 1ULL << 30, 1), lak::InvalidArgument);
}

TEST(Sizing, LinearInEachArgument) {
  lak::test::for_all(11, 200, [](lak::test::Gen& g, std::size_t i) {
    const auto s = g.size(0, 100000), b = g.size(1, 8 * kMiB), r = g.size(1, 5);
    const auto k = g.size(1, 7);
    const auto base = estimate_storage(s, b, r).total_bytes;
    EXPECT_EQ(estimate_storage(s * k, b, r).total_bytes, base * k) << "case " << i;
    EXPECT_EQ(estimate_storage(s, b * k, r).total_bytes, base * k) << "case " << i;
    EXPECT_EQ(estimate_storage(s, b, r * k).total_bytes, base * k) << "case " << i;
  });
}

}  // namespace
