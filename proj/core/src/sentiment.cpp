#include "lak/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lak/error.hpp"

namespace lak::sentiment {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

bool is_token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

double parse_score(std::string_view text, std::size_t line_no) {
  text = trim(text);
  double v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError("lexicon line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Negative: return "Negative";
    case Category::Neutral: return "Neutral";
    case Category::Positive: return "Positive";
  }
  return "?";
}

Lexicon::Lexicon(std::map<std::string, double, std::less<>> entries, std::set<std::string, std::less<>> negators,
                 std::map<std::string, double, std::less<>> intensifiers)
    : entries_(std::move(entries)), negators_(std::move(negators)), intensifiers_(std::move(intensifiers)) {
  for (const auto& [token, score] : entries_) {
    if (!(score >= kMinScore && score <= kMaxScore)) {
      throw ConfigError("lexicon score for '" + token + "' is outside [0, 4]");
    }
    if (negators_.contains(token) || intensifiers_.contains(token)) {
      throw ConfigError("lexicon token '" + token + "' is also a negator or intensifier");
    }
  }
  for (const auto& [token, delta] : intensifiers_) {
    if (!(delta > 0) || !std::isfinite(delta)) throw ConfigError("intensifier '" + token + "' needs a positive delta");
    if (negators_.contains(token)) throw ConfigError("token '" + token + "' is both negator and intensifier");
  }
}

Lexicon Lexicon::parse(std::string_view text) {
  std::map<std::string, double, std::less<>> entries;
  std::set<std::string, std::less<>> negators;
  std::map<std::string, double, std::less<>> intensifiers;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const std::string_view raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) { return ConfigError("lexicon line " + std::to_string(line_no) + ": " + why); };
    if (line.starts_with("#negator ")) {
      const std::string token(trim(line.substr(9)));
      if (token.empty() || token.find_first_of(" \t") != std::string::npos) throw fail("bad negator directive");
      if (!negators.insert(token).second) throw fail("duplicate negator '" + token + "'");
      continue;
    }
    if (line.starts_with("#intensifier ")) {
      const std::string_view rest = trim(line.substr(13));
      const auto sp = rest.find_first_of(" \t");
      if (sp == std::string_view::npos) throw fail("intensifier directive needs a delta");
      const std::string token(rest.substr(0, sp));
      if (!intensifiers.emplace(token, parse_score(rest.substr(sp), line_no)).second) {
        throw fail("duplicate intensifier '" + token + "'");
      }
      continue;
    }
    if (line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw fail("expected token<TAB>score");
    std::string token(trim(line.substr(0, tab)));
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (token.empty()) throw fail("empty token");
    if (!entries.emplace(token, parse_score(line.substr(tab + 1), line_no)).second) {
      throw fail("duplicate entry '" + token + "'");
    }
  }
  return Lexicon(std::move(entries), std::move(negators), std::move(intensifiers));
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lexicon '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<double> Lexicon::score_of(std::string_view token) const {
  const auto it = entries_.find(token);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Lexicon::intensifier_delta(std::string_view token) const {
  const auto it = intensifiers_.find(token);
  if (it == intensifiers_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '.' || text[i] == '!' || text[i] == '?' || text[i] == '\n') {
      const std::string_view piece = trim(text.substr(start, i - start));
      if (!piece.empty()) out.emplace_back(piece);
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : sentence) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double score_sentence(std::string_view sentence, const Lexicon& lexicon) {
  struct Modifier {
    std::size_t pos;
    double delta;  // 0 for negators
  };
  std::vector<Modifier> pending;
  double sum = 0;
  std::size_t count = 0;

  const auto tokens = tokenize(sentence);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (lexicon.is_negator(tok)) {
      pending.push_back({i, 0.0});
      continue;
    }
    if (const auto delta = lexicon.intensifier_delta(tok)) {
      pending.push_back({i, *delta});
      continue;
    }
    const auto base = lexicon.score_of(tok);
    if (!base) continue;

    double s = *base;
    double push = 0;
    for (const auto& m : pending) {
      if (i - m.pos > kModifierWindow) continue;
      if (m.delta == 0.0) {
        s = kMaxScore - s;
      } else {
        push += m.delta;
      }
    }
    pending.clear();
    if (s > kNeutralScore) {
      s += push;
    } else if (s < kNeutralScore) {
      s -= push;
    }
    sum += std::clamp(s, kMinScore, kMaxScore);
    ++count;
  }
  return count == 0 ? kNeutralScore : sum / static_cast<double>(count);
}

Category band(double score) {
  if (!(score >= kMinScore && score <= kMaxScore)) {
    throw InvalidArgument("sentiment score " + std::to_string(score) + " is outside [0, 4]");
  }
  if (score < 2.0) return Category::Negative;
  if (score < 3.0) return Category::Neutral;
  return Category::Positive;
}

double mean_score(const std::vector<ScoredSentence>& sentences) {
  if (sentences.empty()) return kNeutralScore;
  double sum = 0;
  for (const auto& s : sentences) sum += s.score;
  return sum / static_cast<double>(sentences.size());
}

SentimentResult score_document(const catalog::FeedbackDocument& doc, const Lexicon& lexicon) {
  SentimentResult result;
  result.student_id = doc.student_id;
  std::string text;
  for (const auto& answer : doc.answers) {
    text += answer;
    text += '\n';
  }
  for (auto& sentence : split_sentences(text)) {
    const double score = score_sentence(sentence, lexicon);
    result.sentences.push_back({std::move(sentence), score});
  }
  result.average = mean_score(result.sentences);
  result.category = band(result.average);
  return result;
}

}  // namespace lak::sentiment
