#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lak::evalx {

inline constexpr double kDefaultTrainFraction = 0.7;

// Row indices into the caller's table.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded Fisher-Yates permutation; the first round(n * fraction) indices
// train, the rest test. Each part is returned in ascending order.
Split split(std::size_t n, double train_fraction, std::uint64_t seed);

template <class Row>
std::pair<std::vector<Row>, std::vector<Row>> apply_split(std::span<const Row> rows, const Split& s) {
  std::pair<std::vector<Row>, std::vector<Row>> out;
  out.first.reserve(s.train.size());
  out.second.reserve(s.test.size());
  for (std::size_t i : s.train) out.first.push_back(rows[i]);
  for (std::size_t i : s.test) out.second.push_back(rows[i]);
  return out;
}

struct RegressionReport {
  std::size_t n = 0;
  double mse = 0;
  double rmse = 0;
  double mae = 0;
  // Unset when y has zero variance.
  std::optional<double> r_squared;
  std::optional<double> explained_variance;
};

RegressionReport regression_metrics(std::span<const double> y, std::span<const double> y_hat);

struct ClassificationReport {
  // confusion[actual][predicted]; class 1 is dropout.
  std::array<std::array<std::size_t, 2>, 2> confusion{};
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  // Set when the metric's denominator was zero and it is reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  [[nodiscard]] std::size_t n() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
  }
};

ClassificationReport classification_metrics(std::span<const double> y, std::span<const double> y_hat);

std::string render_text(const RegressionReport& r);
std::string render_json(const RegressionReport& r);
std::string render_text(const ClassificationReport& r);
std::string render_json(const ClassificationReport& r);

// Pairs prediction and truth CSV files. A column named `key` present in both
// joins rows by key, otherwise rows pair by position. The value column is the
// first column whose name is not the key.
struct PairedColumns {
  std::vector<std::string> keys;
  std::vector<double> truth;
  std::vector<double> predicted;
};

PairedColumns read_paired_csv(const std::string& pred_path, const std::string& truth_path,
                              const std::string& key = "student_id");

}  // namespace lak::evalx
