#include "lak/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "lak/error.hpp"

namespace lak::catalog {
namespace {

using enum ValueKind;
using enum Factor;

std::vector<DataPointCategory> build_categories() {
  return {
      {CategoryCode::A,
       "Student Logs",
       {{"name", Text, OutOfInstitution},
        {"age", Numeric, OutOfInstitution},
        {"gender", Categorical, OutOfInstitution},
        {"location", Text, OutOfInstitution},
        {"previous_school", Text, AcademicIntegration},
        {"school_graduation_marks", Numeric, AcademicIntegration},
        {"major", Categorical, AcademicIntegration},
        {"passed_hours", Numeric, AcademicIntegration}}},
      {CategoryCode::B,
       "Student's Performance Statistics",
       {{"internal_assessment_marks", Numeric, AcademicIntegration},
        {"midterm_grades", Numeric, AcademicIntegration},
        {"annual_examination_grades", Numeric, AcademicIntegration},
        {"laboratory_marks", Numeric, AcademicIntegration},
        {"project_marks", Numeric, AcademicIntegration},
        {"gpa", Numeric, AcademicIntegration},
        {"quiz_5", Numeric, AcademicIntegration},
        {"mid1_15", Numeric, AcademicIntegration},
        {"mid2_20", Numeric, AcademicIntegration},
        {"tutorial_2", Numeric, AcademicIntegration},
        {"homework_3", Numeric, AcademicIntegration},
        {"lecture_total_45", Numeric, AcademicIntegration},
        {"lab_total_10", Numeric, AcademicIntegration},
        {"final_lab_5", Numeric, AcademicIntegration},
        {"final_exam", Numeric, AcademicIntegration},
        {"total_100", Numeric, AcademicIntegration},
        {"grade", Categorical, AcademicIntegration},
        {"semester", Categorical, AcademicIntegration}}},
      {CategoryCode::C,
       "Student Engagement Metrics",
       {{"daily_attendance", Numeric, AcademicIntegration},
        {"absence_rate", Numeric, AcademicIntegration},
        {"seminar_participation", Numeric, AcademicIntegration},
        {"group_study_participation", Numeric, SocialIntegration},
        {"workshop_attendance", Numeric, InstitutionalCommitment},
        {"feedback_reviews", Text, AcademicIntegration}}},
      {CategoryCode::D,
       "Student's Online Learning Engagement",
       {{"lms_course_list", Text, AcademicIntegration},
        {"lms_login_logout_timestamp", Timestamp, AcademicIntegration},
        {"lms_duration_per_day", Numeric, AcademicIntegration},
        {"lms_examination_marks", Numeric, AcademicIntegration},
        {"lms_modules_completed", Numeric, AcademicIntegration}}},
      {CategoryCode::E,
       "Past student Achievement",
       {{"student_winners", Boolean, AcademicIntegration},
        {"students_marks", Numeric, AcademicIntegration},
        {"extra_curricular_awards", Numeric, SocialIntegration},
        {"student_dropout_rate", Numeric, AcademicIntegration},
        {"status", Boolean, AcademicIntegration}}},
      {CategoryCode::F,
       "Student's Social Network",
       {{"students_study_group", Categorical, SocialIntegration},
        {"students_circle_of_friends", Text, SocialIntegration}}},
      {CategoryCode::G,
       "Student's Extra Curricular Activities",
       {{"club_membership", Categorical, SocialIntegration},
        {"club_attendance", Numeric, SocialIntegration},
        {"competition_participation", Numeric, SocialIntegration}}},
      {CategoryCode::H,
       "Student's Health Background",
       {{"is_disabled", Boolean, OutOfInstitution}, {"has_chronic_disease", Boolean, OutOfInstitution}}},
      {CategoryCode::I,
       "Student's Financial Background",
       {{"annual_household_income", Numeric, OutOfInstitution},
        {"has_loan", Boolean, OutOfInstitution},
        {"fee_payment_delay_record", Numeric, OutOfInstitution},
        {"has_scholarship", Boolean, InstitutionalCommitment}}},
  };
}

const Variable* find_variable(std::string_view name) {
  for (const auto& cat : data_point_categories()) {
    for (const auto& v : cat.variables) {
      if (v.name == name) return &v;
    }
  }
  return nullptr;
}

double parse_number(std::string_view field, std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw InvalidArgument(std::string(field) + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view field, std::string_view text) {
  const double v = parse_number(field, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw InvalidArgument(std::string(field) + ": not an integer: '" + std::string(text) + "'");
  }
  return static_cast<int>(v);
}

const std::string& require(const std::map<std::string, std::string, std::less<>>& fields, std::string_view name) {
  const auto it = fields.find(name);
  if (it == fields.end()) throw InvalidArgument("missing field '" + std::string(name) + "'");
  return it->second;
}

}  // namespace

std::string_view to_string(Factor f) {
  switch (f) {
    case AcademicIntegration: return "AcademicIntegration";
    case SocialIntegration: return "SocialIntegration";
    case InstitutionalCommitment: return "InstitutionalCommitment";
    case OutOfInstitution: return "OutOfInstitution";
  }
  return "?";
}

const std::vector<DataPointCategory>& data_point_categories() {
  static const std::vector<DataPointCategory> categories = build_categories();
  return categories;
}

const DataPointCategory& category(CategoryCode code) {
  for (const auto& c : data_point_categories()) {
    if (c.code == code) return c;
  }
  throw NotFoundError(std::string("unknown category code ") + static_cast<char>(code));
}

std::optional<CategoryCode> category_of(std::string_view variable_name) {
  for (const auto& cat : data_point_categories()) {
    for (const auto& v : cat.variables) {
      if (v.name == variable_name) return cat.code;
    }
  }
  return std::nullopt;
}

Factor categorize_factor(std::string_view variable_name) {
  const Variable* v = find_variable(variable_name);
  if (!v) throw NotFoundError("variable '" + std::string(variable_name) + "' is not registered in any data-point category");
  return v->factor;
}

TableSchema schema_for(const DataPointCategory& cat) {
  TableSchema schema;
  schema.table = std::string(1, static_cast<char>(cat.code));
  schema.key = "student_id";
  schema.fields.push_back({"student_id", Text, {}, {}});
  for (const auto& v : cat.variables) schema.fields.push_back({v.name, v.kind, {}, {}});
  return schema;
}

const TableSchema& student_record_schema() {
  static const TableSchema schema = [] {
    TableSchema s;
    s.table = "marks";
    s.key = "student_id";
    s.fields = {
        {"student_id", Text, {}, {}},
        {"gpa", Numeric, 0.0, 5.0},
        {"major", Categorical, {}, {}},
        {"passed_hours", Numeric, 0.0, {}},
        {"absence_rate", Numeric, 0.0, 1.0},
        {"quiz_5", Numeric, 0.0, 5.0},
        {"mid1_15", Numeric, 0.0, 15.0},
        {"mid2_20", Numeric, 0.0, 20.0},
        {"tutorial_2", Numeric, 0.0, 2.0},
        {"homework_3", Numeric, 0.0, 3.0},
        {"lecture_total_45", Numeric, 0.0, 45.0},
        {"lab_total_10", Numeric, 0.0, 10.0},
        {"final_lab_5", Numeric, 0.0, 5.0},
        {"final_exam", Numeric, 0.0, 40.0},
        {"total_100", Numeric, 0.0, 100.0},
        {"grade", Categorical, {}, {}},
        {"status", Boolean, {}, {}},
        {"semester", Categorical, {}, {}},
    };
    return s;
  }();
  return schema;
}

StudentRecord record_from_fields(const std::map<std::string, std::string, std::less<>>& f) {
  StudentRecord r;
  r.student_id = require(f, "student_id");
  r.gpa = parse_number("gpa", require(f, "gpa"));
  r.major = require(f, "major");
  r.passed_hours = parse_int("passed_hours", require(f, "passed_hours"));
  r.absence_rate = parse_number("absence_rate", require(f, "absence_rate"));
  r.quiz_5 = parse_number("quiz_5", require(f, "quiz_5"));
  r.mid1_15 = parse_number("mid1_15", require(f, "mid1_15"));
  r.mid2_20 = parse_number("mid2_20", require(f, "mid2_20"));
  r.tutorial_2 = parse_number("tutorial_2", require(f, "tutorial_2"));
  r.homework_3 = parse_number("homework_3", require(f, "homework_3"));
  r.lecture_total_45 = parse_number("lecture_total_45", require(f, "lecture_total_45"));
  r.lab_total_10 = parse_number("lab_total_10", require(f, "lab_total_10"));
  r.final_lab_5 = parse_number("final_lab_5", require(f, "final_lab_5"));
  r.final_exam = parse_number("final_exam", require(f, "final_exam"));
  r.total_100 = parse_number("total_100", require(f, "total_100"));
  r.grade = require(f, "grade");
  const std::string& status = require(f, "status");
  if (status == "true") {
    r.status = 1;
  } else if (status == "false") {
    r.status = 0;
  } else {
    r.status = parse_int("status", status);
  }
  r.semester = require(f, "semester");
  return r;
}

std::map<std::string, std::string, std::less<>> record_to_fields(const StudentRecord& r) {
  return {
      {"student_id", r.student_id},
      {"gpa", format_number(r.gpa)},
      {"major", r.major},
      {"passed_hours", std::to_string(r.passed_hours)},
      {"absence_rate", format_number(r.absence_rate)},
      {"quiz_5", format_number(r.quiz_5)},
      {"mid1_15", format_number(r.mid1_15)},
      {"mid2_20", format_number(r.mid2_20)},
      {"tutorial_2", format_number(r.tutorial_2)},
      {"homework_3", format_number(r.homework_3)},
      {"lecture_total_45", format_number(r.lecture_total_45)},
      {"lab_total_10", format_number(r.lab_total_10)},
      {"final_lab_5", format_number(r.final_lab_5)},
      {"final_exam", format_number(r.final_exam)},
      {"total_100", format_number(r.total_100)},
      {"grade", r.grade},
      {"status", std::to_string(r.status)},
      {"semester", r.semester},
  };
}

std::optional<double> numeric_field(const StudentRecord& r, std::string_view name) {
  if (name == "gpa") return r.gpa;
  if (name == "passed_hours") return r.passed_hours;
  if (name == "absence_rate") return r.absence_rate;
  if (name == "quiz_5") return r.quiz_5;
  if (name == "mid1_15") return r.mid1_15;
  if (name == "mid2_20") return r.mid2_20;
  if (name == "tutorial_2") return r.tutorial_2;
  if (name == "homework_3") return r.homework_3;
  if (name == "lecture_total_45") return r.lecture_total_45;
  if (name == "lab_total_10") return r.lab_total_10;
  if (name == "final_lab_5") return r.final_lab_5;
  if (name == "final_exam") return r.final_exam;
  if (name == "total_100") return r.total_100;
  if (name == "status") return r.status;
  return std::nullopt;
}

std::optional<std::string> categorical_field(const StudentRecord& r, std::string_view name) {
  if (name == "major") return r.major;
  if (name == "grade") return r.grade;
  if (name == "semester") return r.semester;
  return std::nullopt;
}

ValidationReport validate_record(const StudentRecord& r, Strictness strictness, const TableSchema& schema) {
  ValidationReport report;
  if (r.student_id.empty()) report.push_back({"student_id", "student_id is empty"});

  for (const auto& field : schema.fields) {
    if (field.kind == Boolean) {
      const auto v = numeric_field(r, field.name);
      if (v && *v != 0 && *v != 1) report.push_back({field.name, field.name + " is not 0 or 1"});
      continue;
    }
    if (field.kind != Numeric) continue;
    const auto v = numeric_field(r, field.name);
    if (!v) continue;
    if (!std::isfinite(*v)) {
      report.push_back({field.name, field.name + " is not a number"});
    } else if (field.min && *v < *field.min) {
      report.push_back({field.name, field.name + " is below " + format_number(*field.min)});
    } else if (field.max && *v > *field.max) {
      report.push_back({field.name, field.name + " exceeds " + format_number(*field.max)});
    }
  }

  if (strictness == Strictness::Strict) {
    const double lecture = r.quiz_5 + r.mid1_15 + r.mid2_20 + r.tutorial_2 + r.homework_3;
    if (!(std::abs(lecture - r.lecture_total_45) <= kSumTolerance)) {
      report.push_back({"lecture_total_45", "lecture_total_45 (" + format_number(r.lecture_total_45) +
                                                ") does not equal quiz_5+mid1_15+mid2_20+tutorial_2+homework_3 (" +
                                                format_number(lecture) + ")"});
    }
    const double total = r.lecture_total_45 + r.lab_total_10 + r.final_lab_5 + r.final_exam;
    if (!(std::abs(total - r.total_100) <= kSumTolerance)) {
      report.push_back({"total_100", "total_100 (" + format_number(r.total_100) +
                                         ") does not equal lecture_total_45+lab_total_10+final_lab_5+final_exam (" +
                                         format_number(total) + ")"});
    }
  }
  return report;
}

std::string_view target_name(Target t) { return t == Target::Total100 ? "total_100" : "status"; }

FeatureSpec::FeatureSpec(std::vector<FeatureDef> features, Target target)
    : features_(std::move(features)), target_(target) {
  std::set<std::string_view> names;
  for (const auto& f : features_) {
    if (f.name.empty()) throw InvalidArgument("feature with empty name");
    if (!names.insert(f.name).second) throw InvalidArgument("duplicate feature '" + f.name + "'");
    if (f.kind == FeatureKind::Categorical && f.levels.empty()) {
      throw InvalidArgument("categorical feature '" + f.name + "' has an empty dictionary");
    }
    if (f.kind == FeatureKind::Continuous && !f.levels.empty()) {
      throw InvalidArgument("continuous feature '" + f.name + "' carries a dictionary");
    }
  }
}

FeatureSpec FeatureSpec::fit(const std::vector<std::string>& feature_names, Target target,
                             std::span<const StudentRecord> training) {
  std::vector<FeatureDef> defs;
  defs.reserve(feature_names.size());
  for (const auto& name : feature_names) {
    FeatureDef def;
    def.name = name;
    const StudentRecord probe;
    if (categorical_field(probe, name)) {
      def.kind = FeatureKind::Categorical;
      std::set<std::string> levels;
      for (const auto& r : training) levels.insert(*categorical_field(r, name));
      def.levels.assign(levels.begin(), levels.end());
      if (def.levels.empty()) throw InvalidArgument("no training levels for categorical feature '" + name + "'");
    } else if (numeric_field(probe, name)) {
      def.kind = FeatureKind::Continuous;
    } else {
      throw InvalidArgument("'" + name + "' is not a feature of the course record");
    }
    defs.push_back(std::move(def));
  }
  return FeatureSpec(std::move(defs), target);
}

const std::vector<std::string>& FeatureSpec::model1_feature_names() {
  static const std::vector<std::string> names = {"absence_rate", "quiz_5",           "mid1_15",      "mid2_20",
                                                 "tutorial_2",   "homework_3",       "lecture_total_45",
                                                 "lab_total_10", "final_lab_5",      "semester"};
  return names;
}

FeatureSpec FeatureSpec::model1(std::span<const StudentRecord> training, Target target) {
  return fit(model1_feature_names(), target, training);
}

std::map<std::size_t, std::size_t> FeatureSpec::categorical_features_info() const {
  std::map<std::size_t, std::size_t> info;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].kind == FeatureKind::Categorical) info.emplace(i, features_[i].arity());
  }
  return info;
}

std::optional<std::size_t> FeatureSpec::code_of(std::size_t feature, std::string_view level) const {
  const auto& levels = features_.at(feature).levels;
  const auto it = std::lower_bound(levels.begin(), levels.end(), level);
  if (it == levels.end() || *it != level) return std::nullopt;
  return static_cast<std::size_t>(it - levels.begin());
}

const std::string& FeatureSpec::level_of(std::size_t feature, std::size_t code) const {
  const auto& levels = features_.at(feature).levels;
  if (code >= levels.size()) {
    throw InvalidArgument("code " + std::to_string(code) + " out of range for feature '" + features_[feature].name + "'");
  }
  return levels[code];
}

std::vector<FeatureDef> FeatureSpec::layout(bool with_sentiment) const {
  std::vector<FeatureDef> out = features_;
  if (with_sentiment) out.push_back({std::string(kSentimentFeature), FeatureKind::Continuous, {}});
  return out;
}

LabeledRow encode_features(const StudentRecord& record, std::optional<double> sentiment, const FeatureSpec& spec) {
  const auto target = numeric_field(record, spec.target_name());
  if (!target || !std::isfinite(*target)) {
    throw InvalidArgument("record '" + record.student_id + "' has no value for target '" +
                          std::string(spec.target_name()) + "'");
  }
  const auto report = validate_record(record, Strictness::Lenient);
  if (!report.empty()) {
    throw InvalidArgument("record '" + record.student_id + "' is invalid: " + report.front().message);
  }

  LabeledRow row;
  row.target = *target;
  row.features.reserve(spec.size() + (sentiment ? 1 : 0));
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& def = spec.features()[i];
    if (def.kind == FeatureKind::Categorical) {
      const auto level = categorical_field(record, def.name);
      const auto code = level ? spec.code_of(i, *level) : std::nullopt;
      if (!code) {
        throw InvalidArgument("unknown level '" + level.value_or("") + "' for categorical feature '" + def.name + "'");
      }
      row.features.push_back(static_cast<double>(*code));
    } else {
      row.features.push_back(*numeric_field(record, def.name));
    }
  }
  if (sentiment) row.features.push_back(*sentiment);
  return row;
}

}  // namespace lak::catalog
