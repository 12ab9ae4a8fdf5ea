#include <gtest/gtest.h>

#include <set>

#include "lak/catalog.hpp"
#include "lak/error.hpp"
#include "lak/schema.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace lak::catalog;
using lak::test::sample_record;

TEST(Categories, NineCodesAThroughIWithUniqueVariables) {
  const auto& cats = data_point_categories();
  ASSERT_EQ(cats.size(), 9u);
  for (std::size_t i = 0; i < cats.size(); ++i) {
    EXPECT_EQ(static_cast<char>(cats[i].code), static_cast<char>('A' + i));
    std::set<std::string> names;
    for (const auto& v : cats[i].variables) EXPECT_TRUE(names.insert(v.name).second) << v.name;
  }
}

TEST(Categories, FactorLookup) {
  EXPECT_EQ(categorize_factor("gpa"), Factor::AcademicIntegration);
  EXPECT_EQ(categorize_factor("annual_household_income"), Factor::OutOfInstitution);
  EXPECT_EQ(categorize_factor("students_circle_of_friends"), Factor::SocialIntegration);
  EXPECT_THROW((void)categorize_factor("shoe_size"), lak::NotFoundError);
  EXPECT_EQ(category_of("absence_rate"), CategoryCode::C);
}

TEST(Categories, SchemaForCategoryKeysOnStudentId) {
  const auto s = schema_for(category(CategoryCode::H));
  EXPECT_EQ(s.key, "student_id");
  ASSERT_NE(s.find("is_disabled"), nullptr);
  EXPECT_EQ(s.find("is_disabled")->kind, ValueKind::Boolean);
}

TEST(Validate, ConsistentRecordIsClean) {
  EXPECT_TRUE(validate_record(sample_record(), Strictness::Strict).empty());
}

TEST(Validate, RangeViolationNamesTheBound) {
  auto r = sample_record();
  r.quiz_5 = 7;
  const auto report = validate_record(r, Strictness::Lenient);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].message, "quiz_5 exceeds 5");
}

TEST(Validate, SumIdentityOnlyUnderStrict) {
  auto r = sample_record();
  r.lecture_total_45 = 36;  // components sum to 37
  r.total_100 = 79;         // keep the course total consistent with the lecture total
  EXPECT_TRUE(validate_record(r, Strictness::Lenient).empty());
  const auto strict = validate_record(r, Strictness::Strict);
  ASSERT_EQ(strict.size(), 1u);
  EXPECT_EQ(strict[0].field, "lecture_total_45");
}

TEST(Validate, CourseTotalIdentity) {
  auto r = sample_record();
  r.total_100 = 81;
  const auto strict = validate_record(r, Strictness::Strict);
  ASSERT_EQ(strict.size(), 1u);
  EXPECT_EQ(strict[0].field, "total_100");
}

TEST(Fields, RoundTripThroughText) {
  const auto r = sample_record();
  EXPECT_EQ(record_from_fields(record_to_fields(r)), r);
  auto f = record_to_fields(r);
  f["gpa"] = "high";
  EXPECT_THROW((void)record_from_fields(f), lak::InvalidArgument);
}

TEST(Encode, Model1VectorOrderAndDictionary) {
  const std::vector<StudentRecord> training{sample_record("a", "2017-2"), sample_record("b", "2017-1")};
  const auto spec = FeatureSpec::model1(training);
  ASSERT_EQ(spec.size(), 10u);
  EXPECT_EQ(spec.features()[9].name, "semester");
  EXPECT_EQ(spec.features()[9].levels, (std::vector<std::string>{"2017-1", "2017-2"}));
  EXPECT_EQ(spec.categorical_features_info(), (std::map<std::size_t, std::size_t>{{9, 2}}));

  const auto row = encode_features(training[0], std::nullopt, spec);
  EXPECT_EQ(row.features,
            (std::vector<double>{0.1, 4.5, 12, 16, 2, 2.5, 37, 8, 4, 1}));
  EXPECT_EQ(row.target, 80);
  EXPECT_EQ(spec.level_of(9, 1), "2017-2");
}

TEST(Encode, SentimentAppendedLast) {
  const std::vector<StudentRecord> training{sample_record()};
  const auto spec = FeatureSpec::model1(training);
  const auto row = encode_features(training[0], 2.5, spec);
  ASSERT_EQ(row.features.size(), 11u);
  EXPECT_EQ(row.features.back(), 2.5);
  EXPECT_EQ(spec.layout(true).back().name, kSentimentFeature);
}

TEST(Encode, UnknownLevelNamesFeatureAndLevel) {
  const std::vector<StudentRecord> training{sample_record()};
  const auto spec = FeatureSpec::model1(training);
  try {
    (void)encode_features(sample_record("x", "2019-9"), std::nullopt, spec);
    FAIL() << "expected an error";
  } catch (const lak::InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("semester"), std::string::npos);
    EXPECT_NE(msg.find("2019-9"), std::string::npos);
  }
}

TEST(Encode, StatusTargetForClassification) {
  auto r = sample_record();
  r.status = 1;
  const std::vector<StudentRecord> training{r};
  const auto spec = FeatureSpec::model1(training, Target::Status);
  EXPECT_EQ(encode_features(r, std::nullopt, spec).target, 1.0);
}

TEST(Schema, ShippedFileMatchesBuiltIn) {
  const auto loaded = load_schema((lak::test::data_dir() / "schema" / "student_record.schema").string());
  EXPECT_EQ(loaded, student_record_schema());
}

TEST(Schema, SerializeParseRoundTrip) {
  const auto& s = student_record_schema();
  EXPECT_EQ(parse_schema(serialize_schema(s)), s);
}

TEST(Schema, Errors) {
  EXPECT_THROW((void)parse_schema("table x\n"), lak::ConfigError);
  EXPECT_THROW((void)parse_schema("lak-schema 2\n"), lak::VersionError);
  EXPECT_THROW((void)parse_schema("lak-schema 1\nkey id\nid:text::\nid:text::\n"), lak::ConfigError);
  EXPECT_THROW((void)parse_schema("lak-schema 1\nkey id\nx:numeric:5:1\n"), lak::ConfigError);
}

TEST(Schema, CheckValueMessages) {
  const auto& s = student_record_schema();
  EXPECT_EQ(s.check_value(*s.find("quiz_5"), "7"), "quiz_5 exceeds 5");
  EXPECT_EQ(s.check_value(*s.find("quiz_5"), "-1"), "quiz_5 is below 0");
  EXPECT_NE(s.check_value(*s.find("quiz_5"), "abc").find("not a number"), std::string::npos);
  EXPECT_EQ(s.check_value(*s.find("status"), "1"), "");
  EXPECT_NE(s.check_value(*s.find("status"), "maybe"), "");
  EXPECT_NE(s.check_value(*s.find("student_id"), ""), "");
}

}  // namespace
