#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "lak/csv.hpp"
#include "lak/error.hpp"
#include "lak/experiment.hpp"
#include "lak/fileio.hpp"
#include "lak/random.hpp"
#include "lak/schema.hpp"

namespace lak::experiment {
namespace {

const std::vector<std::string> kPositive = {
    "The lectures were excellent and the examples were clear.",
    "I really enjoyed the lab sessions.",
    "The instructor was helpful and patient.",
    "Group work was fun and engaging.",
    "The course was very interesting.",
    "I learned useful skills for my career.",
    "The tutorials were well organized.",
    "I would recommend this course to my friends.",
    "The homework was practical and rewarding.",
    "I feel confident about programming now.",
    "The teaching assistants were friendly and supportive.",
    "The quizzes showed my progress every week.",
    "I loved the final project.",
    "The midterm review was great.",
};

const std::vector<std::string> kNeutral = {
    "The course covered the topics in the syllabus.",
    "Lectures were held twice a week.",
    "The workload was manageable.",
    "The exams were okay.",
    "Most assignments were of average length.",
    "The lab room was fine.",
    "I attended the lectures and the labs.",
    "The pace was moderate.",
    "Some topics were challenging.",
    "The textbook was adequate.",
    "Office hours were on Tuesday.",
    "The grading was reasonable.",
};

const std::vector<std::string> kNegative = {
    "The lectures were boring.",
    "The labs were confusing and hard.",
    "I struggled with the homework.",
    "The exams were too difficult.",
    "The explanations were unclear.",
    "Deadlines were stressful.",
    "I felt lost in most classes.",
    "The course was not helpful.",
    "The workload was overwhelming.",
    "I am worried about failing.",
    "Marks for the assignments came back late.",
    "Group projects were frustrating.",
    "I did not enjoy the tutorials.",
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Marks are recorded in quarter points, which binary doubles hold exactly,
// so the sum identities hold without rounding error.
double quarter(double v) { return std::round(v * 4.0) / 4.0; }

std::string grade_of(double total) {
  if (total >= 90) return "A";
  if (total >= 80) return "B";
  if (total >= 70) return "C";
  if (total >= 60) return "D";
  return "F";
}

std::string answer(SplitMix64& rng, const std::vector<std::string>& pool) {
  const std::size_t count = 1 + static_cast<std::size_t>(rng.bounded(2));
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += ' ';
    out += pool[static_cast<std::size_t>(rng.bounded(pool.size()))];
  }
  return out;
}

}  // namespace

std::string_view to_string(Attitude a) {
  switch (a) {
    case Attitude::Negative: return "negative";
    case Attitude::Neutral: return "neutral";
    case Attitude::Positive: return "positive";
  }
  return "?";
}

Attitude parse_attitude(std::string_view text) {
  if (text == "negative") return Attitude::Negative;
  if (text == "neutral") return Attitude::Neutral;
  if (text == "positive") return Attitude::Positive;
  throw InvalidArgument("unknown attitude '" + std::string(text) + "'");
}

const std::vector<std::string>& sentence_pool(Attitude attitude) {
  switch (attitude) {
    case Attitude::Negative: return kNegative;
    case Attitude::Neutral: return kNeutral;
    case Attitude::Positive: return kPositive;
  }
  return kNeutral;
}

void GeneratorConfig::validate() const {
  if (n_students == 0) throw ConfigError("n_students must be positive");
  if (!(response_rate >= 0.0 && response_rate <= 1.0)) throw ConfigError("response_rate must lie in [0, 1]");
  for (double p : {p_negative, p_neutral, p_positive}) {
    if (!(p >= 0.0)) throw ConfigError("attitude probabilities must be non-negative");
  }
  if (std::abs(p_negative + p_neutral + p_positive - 1.0) > 1e-9) {
    throw ConfigError("attitude probabilities must sum to 1");
  }
  if (!(effect_delta >= 0.0)) throw ConfigError("effect_delta must be non-negative");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
}

std::size_t GeneratorConfig::respondents() const {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n_students) * response_rate));
}

Cohort generate(const GeneratorConfig& config) {
  config.validate();
  const std::size_t n = config.n_students;

  // Respondents: the first k of a seeded permutation.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 pick(derive_seed(config.seed, 0));
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[static_cast<std::size_t>(pick.bounded(i + 1))]);
  std::vector<bool> responds(n, false);
  for (std::size_t i = 0; i < config.respondents(); ++i) responds[order[i]] = true;

  Cohort out;
  const std::size_t width = std::max<std::size_t>(4, std::to_string(n).size());
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng(derive_seed(derive_seed(config.seed, 1), i));
    const double ability = rng.normal();
    const double u = rng.uniform01();
    const Attitude attitude = u < config.p_negative                      ? Attitude::Negative
                              : u < config.p_negative + config.p_neutral ? Attitude::Neutral
                                                                         : Attitude::Positive;
    auto mark = [&](double max) { return quarter(max * clamp01(0.7 + 0.12 * ability + config.noise_sigma * rng.normal())); };

    std::string id = std::to_string(i + 1);
    id = "s" + std::string(width - std::min(width, id.size()), '0') + id;
    catalog::StudentRecord r;
    r.student_id = id;
    r.major = "CS";
    r.semester = rng.bounded(2) == 0 ? "2017-1" : "2017-2";
    r.passed_hours = 30 + static_cast<int>(rng.bounded(91));
    r.absence_rate = std::round(100.0 * clamp01(0.12 - 0.05 * ability + 0.5 * config.noise_sigma * rng.normal())) / 100.0;
    r.quiz_5 = mark(5);
    r.mid1_15 = mark(15);
    r.mid2_20 = mark(20);
    r.tutorial_2 = mark(2);
    r.homework_3 = mark(3);
    r.lab_total_10 = mark(10);
    r.final_lab_5 = mark(5);
    const double shift = attitude == Attitude::Positive ? 1.0 : attitude == Attitude::Negative ? -1.0 : 0.0;
    const double exam = 40.0 * clamp01(0.6 + 0.15 * ability + config.noise_sigma * rng.normal());
    r.final_exam = quarter(std::clamp(exam + shift * config.effect_delta, 0.0, 40.0));
    r.lecture_total_45 = r.quiz_5 + r.mid1_15 + r.mid2_20 + r.tutorial_2 + r.homework_3;
    r.total_100 = r.lecture_total_45 + r.lab_total_10 + r.final_lab_5 + r.final_exam;
    r.grade = grade_of(r.total_100);
    r.status = r.total_100 < 50 ? 1 : 0;
    r.gpa = std::round(100.0 * std::clamp(2.8 + 0.6 * ability + config.noise_sigma * rng.normal(), 0.0, 5.0)) / 100.0;

    if (responds[i]) {
      catalog::FeedbackDocument doc;
      doc.student_id = r.student_id;
      SplitMix64 words(derive_seed(derive_seed(config.seed, 2), i));
      for (auto& a : doc.answers) a = answer(words, sentence_pool(attitude));
      doc.collected_at = "2017-12-" + std::string(i % 2 == 0 ? "10" : "11") + "T09:00:00Z";
      out.feedback.push_back(std::move(doc));
    }
    out.truth.push_back({r.student_id, ability, attitude, responds[i]});
    out.marks.push_back(std::move(r));
  }
  return out;
}

CohortFiles write_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CohortFiles files{dir / "marks.csv", dir / "feedback.csv", dir / "truth.csv"};

  const auto& schema = catalog::student_record_schema();
  const auto header = schema.field_names();
  std::string marks = csv::format_row(header) + "\n";
  for (const auto& r : cohort.marks) {
    const auto fields = catalog::record_to_fields(r);
    std::vector<std::string> row;
    for (const auto& name : header) row.push_back(fields.at(name));
    marks += csv::format_row(row) + "\n";
  }
  write_text_file(files.marks, marks);

  std::string feedback = "student_id,q1,q2,q3,collected_at\n";
  for (const auto& d : cohort.feedback) {
    feedback += csv::format_row({d.student_id, d.answers[0], d.answers[1], d.answers[2], d.collected_at}) + "\n";
  }
  write_text_file(files.feedback, feedback);

  std::string truth = "student_id,ability,attitude,respondent\n";
  for (const auto& t : cohort.truth) {
    truth += csv::format_row({t.student_id, catalog::format_number(t.ability), std::string(to_string(t.attitude)),
                              t.respondent ? "1" : "0"}) +
             "\n";
  }
  write_text_file(files.truth, truth);
  return files;
}

}  // namespace lak::experiment
