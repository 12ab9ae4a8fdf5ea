#include <gtest/gtest.h>

#include "lak/error.hpp"
#include "lak/experiment.hpp"
#include "lak/sentiment.hpp"
#include "support/gen.hpp"
#include "support/temp_dir.hpp"

namespace {

using namespace lak::sentiment;
using Strings = std::vector<std::string>;

const Lexicon& lexicon() {
  static const Lexicon lex = Lexicon::load(lak::test::data_dir() / "lexicon" / "education.tsv");
  return lex;
}

TEST(Split, Delimiters) {
  EXPECT_EQ(split_sentences("Good course. Hard labs!"), (Strings{"Good course", "Hard labs"}));
  EXPECT_EQ(split_sentences(""), Strings{});
  EXPECT_EQ(split_sentences("one sentence no terminator"), Strings{"one sentence no terminator"});
  EXPECT_EQ(split_sentences("  Why?\n\nok ...  "), (Strings{"Why", "ok"}));
}

TEST(Tokenize, LowercaseAlphanumericRuns) {
  EXPECT_EQ(tokenize("Didn't LIKE lab-3"), (Strings{"didn", "t", "like", "lab", "3"}));
}

TEST(Lexicon, ShippedFileIsWellFormed) {
  const auto& lex = lexicon();
  EXPECT_GE(lex.entries().size(), 100u);
  EXPECT_EQ(lex.score_of("excellent"), 3.8);
  EXPECT_EQ(lex.score_of("good"), 3.2);
  EXPECT_TRUE(lex.is_negator("not"));
  EXPECT_EQ(lex.intensifier_delta("very"), 0.5);
  for (const auto& [t, s] : lex.entries()) {
    EXPECT_GE(s, 0.0) << t;
    EXPECT_LE(s, 4.0) << t;
    EXPECT_FALSE(lex.is_negator(t)) << t;
    EXPECT_FALSE(lex.intensifier_delta(t)) << t;
  }
}

TEST(Lexicon, ParseErrors) {
  EXPECT_THROW((void)Lexicon::parse("good\t5\n"), lak::ConfigError);
  EXPECT_THROW((void)Lexicon::parse("good\tx\n"), lak::ConfigError);
  EXPECT_THROW((void)Lexicon::parse("#negator good\ngood\t3\n"), lak::ConfigError);
  EXPECT_THROW((void)Lexicon::parse("#intensifier very -1\n"), lak::ConfigError);
  EXPECT_THROW((void)Lexicon::load("/nonexistent/lexicon.tsv"), lak::Error);
}

TEST(Score, FixtureExamples) {
  EXPECT_DOUBLE_EQ(score_sentence("the course was excellent", lexicon()), 3.8);
  EXPECT_NEAR(score_sentence("not good", lexicon()), 0.8, 1e-12);
  EXPECT_DOUBLE_EQ(score_sentence("I attended every week", lexicon()), 2.0);
}

TEST(Score, ModifiersAndWindow) {
  EXPECT_NEAR(score_sentence("very good", lexicon()), 3.7, 1e-12);
  EXPECT_NEAR(score_sentence("not very good", lexicon()), 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(score_sentence("extremely excellent", lexicon()), 4.0);
  // Three tokens between the negator and the sentiment word: out of range.
  EXPECT_DOUBLE_EQ(score_sentence("not a b c good", lexicon()), 3.2);
  EXPECT_NEAR(score_sentence("not a b good", lexicon()), 0.8, 1e-12);
  // A negator is consumed by the first sentiment word it applies to.
  EXPECT_NEAR(score_sentence("not good excellent", lexicon()), (0.8 + 3.8) / 2, 1e-12);
}

TEST(Score, DoubleNegationRestores) {
  EXPECT_DOUBLE_EQ(score_sentence("not not good", lexicon()), score_sentence("good", lexicon()));
}

TEST(Band, Boundaries) {
  EXPECT_EQ(band(1), Category::Negative);
  EXPECT_EQ(band(3), Category::Positive);
  EXPECT_EQ(band(4), Category::Positive);
  EXPECT_EQ(band(2.5), Category::Neutral);
  EXPECT_EQ(band(2), Category::Neutral);
  EXPECT_EQ(band(0), Category::Negative);
  EXPECT_EQ(band(1.99), Category::Negative);
  EXPECT_EQ(band(2.99), Category::Neutral);
  EXPECT_EQ(band(3.0), Category::Positive);
  EXPECT_THROW((void)band(-0.01), lak::InvalidArgument);
  EXPECT_THROW((void)band(4.01), lak::InvalidArgument);
}

TEST(Band, Monotone) {
  Category prev = band(0);
  for (int i = 0; i <= 4000; ++i) {
    const Category c = band(i / 1000.0);
    EXPECT_GE(static_cast<int>(c), static_cast<int>(prev));
    prev = c;
  }
}

TEST(Document, Averages) {
  EXPECT_DOUBLE_EQ(mean_score({{"a", 3.0}, {"b", 2.0}}), 2.5);
  lak::catalog::FeedbackDocument doc{"s1", {"The course was excellent", "", ""}, ""};
  const auto one = score_document(doc, lexicon());
  EXPECT_EQ(one.sentences.size(), 1u);
  EXPECT_DOUBLE_EQ(one.average, 3.8);
  EXPECT_EQ(one.category, Category::Positive);

  doc.answers = {"The labs were great", "I attended every week", "not good"};
  const auto three = score_document(doc, lexicon());
  EXPECT_EQ(three.sentences.size(), 3u);
  EXPECT_NEAR(three.average, (3.6 + 2.0 + 0.8) / 3, 1e-12);
  EXPECT_EQ(three.student_id, "s1");

  // Answers without terminators still end their sentence.
  doc.answers = {"good", "good", ""};
  EXPECT_EQ(score_document(doc, lexicon()).sentences.size(), 2u);
}

TEST(Document, EmptyIsNeutral) {
  const auto r = score_document({"s2", {"", " ", ""}, ""}, lexicon());
  EXPECT_TRUE(r.sentences.empty());
  EXPECT_DOUBLE_EQ(r.average, 2.0);
  EXPECT_EQ(r.category, Category::Neutral);
}

TEST(SentimentProperty, ScoresStayInRange) {
  const Strings vocab{"not", "never", "very", "extremely", "too", "good", "excellent", "boring",
                      "awful", "the", "course", "so", "really", "no", "great", "difficult"};
  lak::test::for_all(7, 500, [&](lak::test::Gen& g, std::size_t i) {
    std::string s;
    for (std::size_t t = g.size(0, 12); t > 0; --t) s += g.pick(vocab) + " ";
    const double v = score_sentence(s, lexicon());
    EXPECT_GE(v, 0.0) << "case " << i << ": " << s;
    EXPECT_LE(v, 4.0) << "case " << i << ": " << s;
  });
}

TEST(SentimentProperty, DocumentMeanIsOrderInvariant) {
  const auto& pool = lak::experiment::sentence_pool(lak::experiment::Attitude::Neutral);
  lak::test::for_all(8, 100, [&](lak::test::Gen& g, std::size_t i) {
    Strings sentences;
    for (std::size_t t = g.size(1, 6); t > 0; --t) sentences.push_back(g.pick(pool));
    auto join = [](const Strings& v) {
      std::string out;
      for (const auto& s : v) out += s + " ";
      return out;
    };
    const double a = score_document({"x", {join(sentences), "", ""}, ""}, lexicon()).average;
    g.shuffle(sentences);
    const double b = score_document({"x", {join(sentences), "", ""}, ""}, lexicon()).average;
    EXPECT_NEAR(a, b, 1e-12) << "case " << i;
  });
}

// Every generator sentence must land in the band of the attitude it is drawn
// for; the planted signal depends on it.
TEST(SentimentPool, SentencesScoreInTheirBand) {
  using lak::experiment::Attitude;
  const std::pair<Attitude, Category> cases[] = {{Attitude::Negative, Category::Negative},
                                                 {Attitude::Neutral, Category::Neutral},
                                                 {Attitude::Positive, Category::Positive}};
  std::size_t total = 0, agree = 0;
  for (const auto& [attitude, expected] : cases) {
    for (const auto& s : lak::experiment::sentence_pool(attitude)) {
      ++total;
      const bool ok = band(score_sentence(s, lexicon())) == expected;
      agree += ok ? 1 : 0;
      EXPECT_TRUE(ok) << s;
    }
  }
  EXPECT_GE(static_cast<double>(agree), 0.95 * static_cast<double>(total));
}

}  // namespace
