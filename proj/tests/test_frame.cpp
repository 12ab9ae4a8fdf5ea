#include <gtest/gtest.h>

#include <bit>
#include <fstream>

#include "lak/error.hpp"
#include "lak/frame.hpp"
#include "support/gen.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace lak::storage;

ColumnTable sample_table(std::size_t rows, std::uint64_t seed) {
  lak::test::Gen g(seed);
  ColumnTable t;
  std::vector<std::string> ids(rows);
  for (std::size_t i = 0; i < rows; ++i) ids[i] = "s" + std::to_string(1000 + i);
  t.columns.push_back({"student_id", ids, {}});
  for (int c = 0; c < 9; ++c) {
    std::vector<double> v(rows);
    for (auto& x : v) x = g.real(-1e6, 1e6) / 3.0;  // full-precision doubles
    t.columns.push_back({"f" + std::to_string(c), v, {}});
  }
  std::vector<std::int64_t> codes(rows);
  std::vector<std::uint8_t> nulls(rows, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    codes[i] = static_cast<std::int64_t>(g.u64() >> 1) * (g.coin() ? -1 : 1);
    if (i % 7 == 3) {
      nulls[i] = 1;
      codes[i] = 0;
    }
  }
  t.columns.push_back({"code", codes, nulls});
  return t;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

TEST(Frame, RoundTripIsBitExact) {
  lak::test::TempDir dir("frame");
  const auto table = sample_table(500, 1);
  ASSERT_EQ(table.columns.size(), 11u);
  write_frame(table, dir / "a.laf");
  const auto back = read_frame(dir / "a.laf");
  ASSERT_EQ(back.columns.size(), 11u);
  EXPECT_EQ(back.rows(), 500u);
  for (std::size_t c = 1; c <= 9; ++c) EXPECT_TRUE(bit_equal(back.columns[c].f64(), table.columns[c].f64()));
  EXPECT_EQ(back, table);
}

TEST(Frame, ProjectionReadsOnlyWhatItNeeds) {
  lak::test::TempDir dir("frame");
  write_frame(sample_table(500, 2), dir / "a.laf");
  FrameReadStats stats;
  const auto two = read_frame(dir / "a.laf", std::vector<std::string>{"f3", "student_id"}, &stats);
  ASSERT_EQ(two.columns.size(), 2u);
  EXPECT_EQ(two.columns[0].name, "f3");
  EXPECT_EQ(two.columns[1].name, "student_id");
  EXPECT_GT(stats.bytes_read, 0u);
  EXPECT_LT(static_cast<double>(stats.bytes_read), 0.30 * static_cast<double>(stats.file_size));
}

TEST(Frame, EmptyFrame) {
  lak::test::TempDir dir("frame");
  write_frame(ColumnTable{}, dir / "e.laf");
  const auto back = read_frame(dir / "e.laf");
  EXPECT_TRUE(back.columns.empty());
  EXPECT_EQ(read_footer(dir / "e.laf").total_rows, 0u);

  ColumnTable zero_rows;
  zero_rows.columns.push_back({"x", std::vector<double>{}, {}});
  write_frame(zero_rows, dir / "z.laf");
  EXPECT_EQ(read_frame(dir / "z.laf"), zero_rows);
}

TEST(Frame, FlippedByteIsDetected) {
  lak::test::TempDir dir("frame");
  write_frame(sample_table(50, 3), dir / "a.laf");
  std::fstream f(dir / "a.laf", std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(40);
  const char c = static_cast<char>(f.get());
  f.seekp(40);
  f.put(static_cast<char>(c ^ 0x20));
  f.close();
  EXPECT_THROW((void)read_frame(dir / "a.laf"), lak::CorruptFileError);
}

TEST(Frame, TruncatedFileIsDetected) {
  lak::test::TempDir dir("frame");
  write_frame(sample_table(50, 4), dir / "a.laf");
  std::filesystem::resize_file(dir / "a.laf", std::filesystem::file_size(dir / "a.laf") - 5);
  EXPECT_THROW((void)read_frame(dir / "a.laf"), lak::CorruptFileError);
}

TEST(Frame, UnknownColumnListsAvailable) {
  lak::test::TempDir dir("frame");
  write_frame(sample_table(5, 5), dir / "a.laf");
  try {
    (void)read_frame(dir / "a.laf", std::vector<std::string>{"nope"});
    FAIL();
  } catch (const lak::NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("student_id"), std::string::npos);
  }
}

TEST(Frame, RejectsRaggedColumns) {
  ColumnTable t;
  t.columns.push_back({"a", std::vector<double>{1, 2}, {}});
  t.columns.push_back({"b", std::vector<double>{1}, {}});
  EXPECT_THROW((void)encode_frame(t), lak::InvalidArgument);
}

TEST(Frame, RewriteIsByteIdentical) {
  lak::test::for_all(21, 20, [](lak::test::Gen& g, std::size_t i) {
    lak::test::TempDir dir("frame");
    const auto table = sample_table(g.size(0, 120), g.u64());
    write_frame(table, dir / "a.laf");
    const auto once = encode_frame(read_frame(dir / "a.laf"));
    EXPECT_EQ(once, encode_frame(table)) << "case " << i;
  });
}

TEST(Frame, LabeledRowsRoundTrip) {
  using lak::catalog::FeatureDef;
  using lak::catalog::FeatureKind;
  const std::vector<FeatureDef> layout{{"x", FeatureKind::Continuous, {}},
                                       {"sem", FeatureKind::Categorical, {"2017-1", "2017-2"}}};
  const std::vector<lak::catalog::LabeledRow> rows{{{0.5, 1}, 70}, {{1.25, 0}, 55.5}};
  const std::vector<std::string> keys{"s1", "s2"};
  const auto table = labeled_frame(layout, "total_100", rows, keys);
  EXPECT_EQ(table.names(), (std::vector<std::string>{"student_id", "x", "sem", "total_100"}));
  EXPECT_EQ(table.at("sem").kind(), ColumnKind::Int64);
  EXPECT_EQ(labeled_rows(table, layout, "total_100"), rows);
}

}  // namespace
