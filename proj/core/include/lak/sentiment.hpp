#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lak/catalog.hpp"

namespace lak::sentiment {

inline constexpr double kMinScore = 0.0;
inline constexpr double kMaxScore = 4.0;
inline constexpr double kNeutralScore = 2.0;
inline constexpr std::size_t kModifierWindow = 3;

enum class Category { Negative, Neutral, Positive };

std::string_view to_string(Category c);

// Token scores plus negator and intensifier sets, pairwise disjoint.
// Immutable once built.
//
// File format (UTF-8): `token<TAB>score` lines, `#negator token` and
// `#intensifier token delta` directives; blank lines and other '#' lines are
// comments.
class Lexicon {
 public:
  Lexicon(std::map<std::string, double, std::less<>> entries, std::set<std::string, std::less<>> negators,
          std::map<std::string, double, std::less<>> intensifiers);

  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::filesystem::path& path);

  [[nodiscard]] std::optional<double> score_of(std::string_view token) const;
  [[nodiscard]] bool is_negator(std::string_view token) const { return negators_.contains(token); }
  [[nodiscard]] std::optional<double> intensifier_delta(std::string_view token) const;

  [[nodiscard]] const std::map<std::string, double, std::less<>>& entries() const { return entries_; }
  [[nodiscard]] const std::set<std::string, std::less<>>& negators() const { return negators_; }
  [[nodiscard]] const std::map<std::string, double, std::less<>>& intensifiers() const { return intensifiers_; }

 private:
  std::map<std::string, double, std::less<>> entries_;
  std::set<std::string, std::less<>> negators_;
  std::map<std::string, double, std::less<>> intensifiers_;
};

// Splits on '.', '!', '?' and newlines; trims; drops empty fragments.
std::vector<std::string> split_sentences(std::string_view text);

// ASCII-lowercased runs of alphanumerics (bytes >= 0x80 count as letters).
std::vector<std::string> tokenize(std::string_view sentence);

// Mean of the adjusted scores of the sentence's lexicon tokens, or 2.0 when
// it has none. Negators and intensifiers seen within the 3 tokens before a
// lexicon token apply to it and are then consumed: each negation maps s to
// 4 - s, each intensifier moves s its delta away from 2, clamped to [0, 4].
double score_sentence(std::string_view sentence, const Lexicon& lexicon);

struct ScoredSentence {
  std::string text;
  double score = kNeutralScore;

  friend bool operator==(const ScoredSentence&, const ScoredSentence&) = default;
};

struct SentimentResult {
  std::string student_id;
  std::vector<ScoredSentence> sentences;
  double average = kNeutralScore;
  Category category = Category::Neutral;

  friend bool operator==(const SentimentResult&, const SentimentResult&) = default;
};

// [0, 2) Negative, [2, 3) Neutral, [3, 4] Positive. Throws InvalidArgument
// outside [0, 4].
Category band(double score);

// Arithmetic mean in sequence order; 2.0 for no scores.
double mean_score(const std::vector<ScoredSentence>& sentences);

// The three answers are scored as one text, each answer ending a sentence.
SentimentResult score_document(const catalog::FeedbackDocument& doc, const Lexicon& lexicon);

}  // namespace lak::sentiment
