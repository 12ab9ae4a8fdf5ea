#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lak/schema.hpp"

namespace lak::catalog {

// ---------------------------------------------------------------------------
// Data-point taxonomy: nine categories (A-I) of student data and the four
// retention factor groups each variable belongs to.
// ---------------------------------------------------------------------------

enum class CategoryCode : char { A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F', G = 'G', H = 'H', I = 'I' };

enum class Factor { AcademicIntegration, SocialIntegration, InstitutionalCommitment, OutOfInstitution };

std::string_view to_string(Factor f);

struct Variable {
  std::string name;
  ValueKind kind;
  Factor factor;
};

struct DataPointCategory {
  CategoryCode code;
  std::string name;
  std::vector<Variable> variables;
};

const std::vector<DataPointCategory>& data_point_categories();
const DataPointCategory& category(CategoryCode code);

// Which category registers the variable, if any.
std::optional<CategoryCode> category_of(std::string_view variable_name);

// Throws NotFoundError for variables no category registers.
Factor categorize_factor(std::string_view variable_name);

// Schema for a category's variables (kinds only, no bounds, key student_id).
TableSchema schema_for(const DataPointCategory& category);

// ---------------------------------------------------------------------------
// Course-mark record
// ---------------------------------------------------------------------------

struct StudentRecord {
  std::string student_id;
  double gpa = 0;
  std::string major;
  int passed_hours = 0;
  double absence_rate = 0;
  double quiz_5 = 0;
  double mid1_15 = 0;
  double mid2_20 = 0;
  double tutorial_2 = 0;
  double homework_3 = 0;
  double lecture_total_45 = 0;
  double lab_total_10 = 0;
  double final_lab_5 = 0;
  double final_exam = 0;
  double total_100 = 0;
  std::string grade;
  int status = 0;  // 0 = continued, 1 = dropout
  std::string semester;

  friend bool operator==(const StudentRecord&, const StudentRecord&) = default;
};

// A student's free-text answers to the three open feedback questions.
struct FeedbackDocument {
  std::string student_id;
  std::array<std::string, 3> answers;
  std::string collected_at;  // ISO-8601, may be empty

  friend bool operator==(const FeedbackDocument&, const FeedbackDocument&) = default;
};

// Default bounds: marks per their suffix, final_exam 0..40, GPA 0..5,
// absence_rate 0..1. Mirrors data/schema/student_record.schema.
const TableSchema& student_record_schema();

// Field-wise conversion between records and the textual cells used by
// delimited files and the raw store. from_fields throws InvalidArgument
// naming the offending field.
StudentRecord record_from_fields(const std::map<std::string, std::string, std::less<>>& fields);
std::map<std::string, std::string, std::less<>> record_to_fields(const StudentRecord& record);

std::optional<double> numeric_field(const StudentRecord& record, std::string_view name);
std::optional<std::string> categorical_field(const StudentRecord& record, std::string_view name);

enum class Strictness { Strict, Lenient };

struct Violation {
  std::string field;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

inline constexpr double kSumTolerance = 1e-9;

// Range checks always; the two sum identities (lecture total, course total)
// only under Strict.
ValidationReport validate_record(const StudentRecord& record, Strictness strictness,
                                 const TableSchema& schema = student_record_schema());

// ---------------------------------------------------------------------------
// Feature encoding
// ---------------------------------------------------------------------------

enum class FeatureKind { Continuous, Categorical };

struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  std::vector<std::string> levels;  // categorical dictionary; code = index

  [[nodiscard]] std::size_t arity() const { return levels.size(); }
  friend bool operator==(const FeatureDef&, const FeatureDef&) = default;
};

enum class Target { Total100, Status };

std::string_view target_name(Target t);

inline constexpr std::string_view kSentimentFeature = "sentiment_score";

struct LabeledRow {
  std::vector<double> features;
  double target = 0;

  friend bool operator==(const LabeledRow&, const LabeledRow&) = default;
};

// Immutable after construction. Categorical dictionaries hold the sorted
// distinct levels seen in the training records passed to fit().
class FeatureSpec {
 public:
  FeatureSpec(std::vector<FeatureDef> features, Target target);

  static FeatureSpec fit(const std::vector<std::string>& feature_names, Target target,
                         std::span<const StudentRecord> training);

  // absence_rate, quiz_5, mid1_15, mid2_20, tutorial_2, homework_3,
  // lecture_total_45, lab_total_10, final_lab_5, semester.
  static const std::vector<std::string>& model1_feature_names();
  static FeatureSpec model1(std::span<const StudentRecord> training, Target target = Target::Total100);

  [[nodiscard]] const std::vector<FeatureDef>& features() const { return features_; }
  [[nodiscard]] std::size_t size() const { return features_.size(); }
  [[nodiscard]] Target target() const { return target_; }
  [[nodiscard]] std::string_view target_name() const { return catalog::target_name(target_); }

  // feature index -> arity, for every categorical feature.
  [[nodiscard]] std::map<std::size_t, std::size_t> categorical_features_info() const;

  [[nodiscard]] std::optional<std::size_t> code_of(std::size_t feature, std::string_view level) const;
  [[nodiscard]] const std::string& level_of(std::size_t feature, std::size_t code) const;

  // Layout of vectors produced with a sentiment value: the spec features
  // followed by a continuous sentiment_score.
  [[nodiscard]] std::vector<FeatureDef> layout(bool with_sentiment) const;

 private:
  std::vector<FeatureDef> features_;
  Target target_;
};

// Vector in spec order, categorical levels mapped through the dictionary,
// sentiment appended iff given. Throws InvalidArgument on an unknown level,
// a missing (non-finite) target, or a record invalid under Lenient.
LabeledRow encode_features(const StudentRecord& record, std::optional<double> sentiment, const FeatureSpec& spec);

}  // namespace lak::catalog
