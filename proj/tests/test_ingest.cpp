#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "lak/error.hpp"
#include "lak/experiment.hpp"
#include "lak/ingest.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace lak::ingest;
using lak::storage::RawStore;
namespace fs = std::filesystem;

const lak::catalog::TableSchema& schema() { return lak::catalog::student_record_schema(); }

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(read_file(p));
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

lak::experiment::CohortFiles default_cohort(const fs::path& dir) {
  lak::experiment::GeneratorConfig g;
  g.seed = 3;
  return lak::experiment::write_cohort(lak::experiment::generate(g), dir);
}

TEST(ImportTable, FiveHundredRows) {
  lak::test::TempDir dir("ingest");
  const auto files = default_cohort(dir.path());
  RawStore store;
  const auto m = import_table(store, files.marks, schema(), 1, {.ingested_at = 99});
  EXPECT_EQ(m.row_count, 500u);
  EXPECT_EQ(m.quarantined_count, 0u);
  EXPECT_EQ(m.source_id, "marks");
  EXPECT_EQ(store.row_count("marks"), 500u);
  EXPECT_EQ(find_manifest(store, "marks", 1), m);
  const auto records = read_student_records(store);
  ASSERT_EQ(records.size(), 500u);
  EXPECT_EQ(records, lak::experiment::generate({.seed = 3}).marks);
}

TEST(ImportTable, HeaderOnlyFile) {
  lak::test::TempDir dir("ingest");
  const auto files = default_cohort(dir.path());
  write_file(dir / "empty.csv", lines_of(files.marks).front() + "\n");
  RawStore store;
  const auto m = import_table(store, dir / "empty.csv", schema(), 1);
  EXPECT_EQ(m.row_count, 0u);
  EXPECT_EQ(find_manifest(store, "marks", 1)->row_count, 0u);
}

TEST(ImportTable, FatalHeaderProblemsWriteNothing) {
  lak::test::TempDir dir("ingest");
  write_file(dir / "bad.csv", "student_id,gpa\ns1,3\n");
  write_file(dir / "blank.csv", "");
  RawStore store;
  EXPECT_THROW((void)import_table(store, dir / "bad.csv", schema(), 1), lak::InvalidArgument);
  EXPECT_THROW((void)import_table(store, dir / "blank.csv", schema(), 1), lak::InvalidArgument);
  EXPECT_THROW((void)import_table(store, dir / "missing.csv", schema(), 1), lak::IoError);
  EXPECT_FALSE(store.has_table("marks") && store.row_count("marks") > 0);
  EXPECT_FALSE(find_manifest(store, "marks", 1));
}

TEST(ImportTable, ConservationWithMalformedRows) {
  lak::test::TempDir dir("ingest");
  const auto files = default_cohort(dir.path());
  auto lines = lines_of(files.marks);
  std::size_t corrupted = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (i % 20 != 0) continue;
    ++corrupted;
    lines[i] = (corrupted % 2 == 0) ? lines[i] + ",extra" : lines[i].substr(0, lines[i].find(','));
  }
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_file(dir / "dirty.csv", text);
  RawStore store;
  const auto m = import_table(store, dir / "dirty.csv", schema(), 1);
  EXPECT_EQ(corrupted, 25u);
  EXPECT_EQ(m.quarantined_count, 25u);
  EXPECT_EQ(m.row_count + m.quarantined_count, 500u);
  EXPECT_EQ(store.row_count("marks_quarantine"), 25u);
  const auto q = store.scan_all("marks_quarantine").rows().front();
  EXPECT_EQ(*q.value("q:line"), "21");
  EXPECT_FALSE(q.value("q:reason")->empty());
}

TEST(ImportTable, OutOfRangeValueIsQuarantined) {
  lak::test::TempDir dir("ingest");
  const auto files = default_cohort(dir.path());
  auto lines = lines_of(files.marks);
  const auto header = lines[0];
  // quiz_5 is the sixth schema column.
  std::vector<std::string> cells;
  std::stringstream ss(lines[1]);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  ASSERT_NE(header.find("quiz_5"), std::string::npos);
  std::size_t quiz = 0;
  {
    std::stringstream hs(header);
    std::size_t i = 0;
    for (std::string c; std::getline(hs, c, ','); ++i) {
      if (c == "quiz_5") quiz = i;
    }
  }
  cells[quiz] = "7";
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) row += (i ? "," : "") + cells[i];
  write_file(dir / "q.csv", header + "\n" + row + "\n");
  RawStore store;
  const auto m = import_table(store, dir / "q.csv", schema(), 1);
  EXPECT_EQ(m.quarantined_count, 1u);
  EXPECT_EQ(*store.scan_all("marks_quarantine").rows().front().value("q:reason"), "quiz_5 exceeds 5");
}

TEST(ImportTable, DuplicateKeyLaterRowWins) {
  lak::test::TempDir dir("ingest");
  const auto files = default_cohort(dir.path());
  const auto lines = lines_of(files.marks);
  write_file(dir / "dup.csv", lines[0] + "\n" + lines[1] + "\n" + lines[2] + "\n" + lines[1] + "\n");
  RawStore store;
  const auto m = import_table(store, dir / "dup.csv", schema(), 1);
  EXPECT_EQ(m.row_count, 3u);
  EXPECT_EQ(m.duplicate_count, 1u);
  EXPECT_FALSE(m.warnings.empty());
  EXPECT_EQ(store.row_count("marks"), 2u);
}

TEST(Snapshots, IdempotentReimportIsByteIdentical) {
  lak::test::TempDir dir("ingest");
  const auto files = default_cohort(dir.path());
  RawStore store(dir / "store");
  const auto first = import_table(store, files.marks, schema(), 1);
  std::map<std::string, std::string> before;
  for (const auto& e : fs::directory_iterator(dir / "store")) before[e.path().filename()] = read_file(e.path());
  const auto again = import_table(store, files.marks, schema(), 1);
  EXPECT_TRUE(again.no_op);
  EXPECT_EQ(again, first);
  std::map<std::string, std::string> after;
  for (const auto& e : fs::directory_iterator(dir / "store")) after[e.path().filename()] = read_file(e.path());
  EXPECT_EQ(before, after);
}

TEST(Snapshots, ConflictsAreRejected) {
  lak::test::TempDir dir("ingest");
  const auto files = default_cohort(dir.path());
  const auto lines = lines_of(files.marks);
  write_file(dir / "small.csv", lines[0] + "\n" + lines[1] + "\n");
  RawStore store;
  (void)import_table(store, files.marks, schema(), 2);
  EXPECT_THROW((void)import_table(store, dir / "small.csv", schema(), 2), lak::InvalidArgument);
  EXPECT_THROW((void)import_table(store, dir / "small.csv", schema(), 1), lak::InvalidArgument);
  EXPECT_THROW((void)import_table(store, dir / "small.csv", schema(), -1), lak::InvalidArgument);
  const auto next = import_table(store, dir / "small.csv", schema(), 3);
  EXPECT_EQ(next.row_count, 1u);
  EXPECT_EQ(manifests(store, "marks").size(), 2u);
  // Snapshot 3 overwrote one student; earlier versions stay readable.
  const auto key = lines[1].substr(0, lines[1].find(','));
  EXPECT_EQ(store.cell_versions("marks", key, "d:gpa").size(), 2u);
}

TEST(ImportEvents, OrderedByTimestampPerStudent) {
  lak::test::TempDir dir("ingest");
  write_file(dir / "ev.jsonl",
             R"({"student_id":"s1","ts":"2017-09-12T10:00:00Z","kind":"login"})" "\n"
             R"({"student_id":"s1","ts":"2017-09-10T08:30:00Z","kind":"login","payload":{"ip":"10.0.0.1"}})" "\n"
             R"({"student_id":"s2","ts":"2017-09-11T00:00:00Z","kind":"login"})" "\n"
             R"({"student_id":"s1","ts":"2017-09-11T09:00:00Z","kind":"login"})" "\n");
  RawStore store;
  const auto m = import_events(store, dir / "ev.jsonl", 1);
  EXPECT_EQ(m.row_count, 4u);
  const auto s1 = store.scan_prefix(kEventsTable, "s1|").rows();
  ASSERT_EQ(s1.size(), 3u);
  EXPECT_EQ(*s1[0].value("e:ts"), "2017-09-10T08:30:00.000Z");
  EXPECT_EQ(*s1[2].value("e:ts"), "2017-09-12T10:00:00.000Z");
  EXPECT_EQ(*s1[0].value("e:payload"), R"({"ip":"10.0.0.1"})");
  EXPECT_LT(event_row_key("a", -5, 0), event_row_key("a", 3, 0));
}

TEST(ImportEvents, BadLinesQuarantinedAndDuplicatesDropped) {
  lak::test::TempDir dir("ingest");
  const std::string good = R"({"student_id":"s1","ts":"2017-09-12T10:00:00Z","kind":"login"})";
  write_file(dir / "ev.jsonl", good + "\n" + R"({"ts":"2017-09-12T10:00:00Z","kind":"login"})" "\n" +
                                   R"({"student_id":"s1","ts":"yesterday","kind":"login"})" "\n" + "{not json\n" +
                                   good + "\n");
  RawStore store;
  const auto m = import_events(store, dir / "ev.jsonl", 1);
  EXPECT_EQ(m.quarantined_count, 3u);
  EXPECT_EQ(m.row_count, 2u);
  EXPECT_EQ(m.duplicate_count, 1u);
  EXPECT_EQ(store.row_count(kEventsTable), 1u);
}

TEST(ImportFeedback, RespondentsAndFlags) {
  lak::test::TempDir dir("ingest");
  const auto files = default_cohort(dir.path());
  RawStore store;
  (void)import_table(store, files.marks, schema(), 1);
  const auto m = import_feedback(store, files.feedback, 1);
  EXPECT_EQ(m.row_count, 126u);
  EXPECT_EQ(read_feedback(store).size(), 126u);

  write_file(dir / "fb.csv", "student_id,q1,q2,q3\nnobody,good,,\n" + lines_of(files.marks)[1].substr(0, 5) + ",,,\n,x,y,z\n");
  RawStore fresh;
  (void)import_table(fresh, files.marks, schema(), 1);
  const auto f = import_feedback(fresh, dir / "fb.csv", 1);
  EXPECT_EQ(f.row_count, 2u);
  EXPECT_EQ(f.quarantined_count, 1u);
  EXPECT_EQ(*fresh.get_row(kFeedbackTable, "nobody")->value("f:orphan"), "1");
  EXPECT_EQ(*fresh.get_row(kFeedbackTable, "nobody")->value("f:zero_length"), "0");
  const auto key = lines_of(files.marks)[1].substr(0, 5);
  EXPECT_EQ(*fresh.get_row(kFeedbackTable, key)->value("f:zero_length"), "1");
  EXPECT_EQ(*fresh.get_row(kFeedbackTable, key)->value("f:orphan"), "0");
}

TEST(ImportFeedback, UnexpectedColumnIsFatal) {
  lak::test::TempDir dir("ingest");
  write_file(dir / "fb.csv", "student_id,q1,q2,q3,rating\ns1,a,b,c,5\n");
  RawStore store;
  EXPECT_THROW((void)import_feedback(store, dir / "fb.csv", 1), lak::InvalidArgument);
}

TEST(Scheduler, ParsesEntries) {
  const auto entries = parse_schedule(
      "# comment\nmarks table in/marks*.csv 5 schema/student.schema\nev events /abs/ev-*.jsonl 1\n", "/base");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].kind, SourceKind::Table);
  EXPECT_EQ(entries[0].pattern, "/base/in/marks*.csv");
  EXPECT_EQ(entries[0].schema_path, "/base/schema/student.schema");
  EXPECT_EQ(entries[1].pattern, "/abs/ev-*.jsonl");
  EXPECT_THROW((void)parse_schedule("a table x 1\n"), lak::ConfigError);
  EXPECT_THROW((void)parse_schedule("a events x 0\n"), lak::ConfigError);
  EXPECT_THROW((void)parse_schedule("a events x 1\na feedback y 1\n"), lak::ConfigError);
  EXPECT_THROW((void)parse_schedule("a tweets x 1\n"), lak::ConfigError);
  EXPECT_TRUE(glob_match("marks-*.csv", "marks-2017.csv"));
  EXPECT_FALSE(glob_match("marks-*.csv", "feedback.csv"));
}

TEST(Scheduler, SecondTickIsNoOpAndNewFilesImport) {
  lak::test::TempDir dir("sched");
  const auto files = default_cohort(dir.path());
  fs::create_directories(dir / "in");
  fs::copy_file(files.marks, dir / "in" / "marks-1.csv");
  const std::string schema_path = (lak::test::data_dir() / "schema" / "student_record.schema").string();
  RawStore store;
  Scheduler sched(store, parse_schedule("marks table in/marks-*.csv 2 " + schema_path + "\n", dir.path()));
  EXPECT_EQ(sched.tick(0).imported.size(), 1u);
  EXPECT_TRUE(sched.tick(1).imported.empty());
  const auto second = sched.tick(2);
  EXPECT_TRUE(second.imported.empty());
  EXPECT_EQ(second.skipped, 1u);

  const auto lines = lines_of(files.marks);
  write_file(dir / "in" / "marks-2.csv", lines[0] + "\n" + lines[5] + "\n");
  const auto third = sched.tick(4);
  ASSERT_EQ(third.imported.size(), 1u);
  EXPECT_EQ(third.imported[0].snapshot_id, 2);
  EXPECT_EQ(third.imported[0].row_count, 1u);
}

TEST(Scheduler, ConcurrentSourcesGetDistinctSnapshots) {
  lak::test::TempDir dir("sched");
  const auto files = default_cohort(dir.path());
  fs::create_directories(dir / "in");
  const auto lines = lines_of(files.marks);
  for (int s = 0; s < 3; ++s) {
    for (int f = 0; f < 2; ++f) {
      write_file(dir / "in" / ("src" + std::to_string(s) + "-" + std::to_string(f) + ".csv"),
                 lines[0] + "\n" + lines[1 + s * 2 + f] + "\n");
    }
  }
  const std::string schema_path = (lak::test::data_dir() / "schema" / "student_record.schema").string();
  std::string conf;
  for (int s = 0; s < 3; ++s) {
    const auto id = std::to_string(s);
    conf += "src" + id + " table in/src" + id + "-*.csv 1 " + schema_path + "\n";
  }
  RawStore store;
  Scheduler sched(store, parse_schedule(conf, dir.path()), 3);
  const auto report = sched.tick(0);
  ASSERT_EQ(report.imported.size(), 6u);
  for (int s = 0; s < 3; ++s) {
    const auto ms = manifests(store, "src" + std::to_string(s));
    ASSERT_EQ(ms.size(), 2u);
    EXPECT_EQ(ms[0].snapshot_id, 1);
    EXPECT_EQ(ms[1].snapshot_id, 2);
  }
  EXPECT_EQ(store.row_count("marks"), 6u);
}

}  // namespace
