#include "lak/evalx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "lak/csv.hpp"
#include "lak/error.hpp"
#include "lak/fileio.hpp"
#include "lak/random.hpp"

namespace lak::evalx {
namespace {

double population_variance(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("undefined"); }

std::string table(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t w = 0;
  for (const auto& [k, v] : rows) w = std::max(w, k.size());
  std::string out;
  for (const auto& [k, v] : rows) out += k + std::string(w - k.size() + 2, ' ') + v + "\n";
  return out;
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

Split split(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie strictly between 0 and 1, got " + fmt(train_fraction));
  }
  if (n < 2) throw InvalidArgument("split needs at least 2 rows, got " + std::to_string(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i + 1));
    std::swap(perm[i], perm[j]);
  }
  const auto cut = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(cut));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(cut), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

RegressionReport regression_metrics(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) {
    throw InvalidArgument("length mismatch: " + std::to_string(y.size()) + " truths, " +
                          std::to_string(y_hat.size()) + " predictions");
  }
  if (y.empty()) throw InvalidArgument("regression metrics need at least one pair");
  const auto n = static_cast<double>(y.size());
  RegressionReport r;
  r.n = y.size();
  std::vector<double> residual(y.size());
  double sse = 0, sae = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    residual[i] = y[i] - y_hat[i];
    sse += residual[i] * residual[i];
    sae += std::abs(residual[i]);
  }
  r.mse = sse / n;
  r.rmse = std::sqrt(r.mse);
  r.mae = sae / n;
  const double var_y = population_variance(y);
  if (y.size() >= 2 && var_y > 0) {
    r.r_squared = 1.0 - sse / (var_y * n);
    r.explained_variance = 1.0 - population_variance(residual) / var_y;
  }
  return r;
}

ClassificationReport classification_metrics(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) {
    throw InvalidArgument("length mismatch: " + std::to_string(y.size()) + " labels, " +
                          std::to_string(y_hat.size()) + " predictions");
  }
  if (y.empty()) throw InvalidArgument("classification metrics need at least one pair");
  ClassificationReport r;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (double v : {y[i], y_hat[i]}) {
      if (v != 0.0 && v != 1.0) throw InvalidArgument("non-binary label " + fmt(v) + " at row " + std::to_string(i));
    }
    ++r.confusion[static_cast<std::size_t>(y[i])][static_cast<std::size_t>(y_hat[i])];
  }
  const auto tp = static_cast<double>(r.confusion[1][1]);
  const auto fp = static_cast<double>(r.confusion[0][1]);
  const auto fn = static_cast<double>(r.confusion[1][0]);
  const auto tn = static_cast<double>(r.confusion[0][0]);
  r.accuracy = (tp + tn) / static_cast<double>(y.size());
  if (tp + fp > 0) {
    r.precision = tp / (tp + fp);
  } else {
    r.precision_undefined = true;
  }
  if (tp + fn > 0) {
    r.recall = tp / (tp + fn);
  } else {
    r.recall_undefined = true;
  }
  if (r.precision + r.recall > 0) {
    r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  } else {
    r.f1_undefined = true;
  }
  return r;
}

std::string render_text(const RegressionReport& r) {
  return table({{"n", std::to_string(r.n)},
                {"MSE", fmt(r.mse)},
                {"RMSE", fmt(r.rmse)},
                {"MAE", fmt(r.mae)},
                {"R-squared", fmt(r.r_squared)},
                {"Explained variance", fmt(r.explained_variance)}});
}

std::string render_json(const RegressionReport& r) {
  const nlohmann::json j{{"n", r.n},
                         {"mse", r.mse},
                         {"rmse", r.rmse},
                         {"mae", r.mae},
                         {"r_squared", opt(r.r_squared)},
                         {"explained_variance", opt(r.explained_variance)}};
  return j.dump(2) + "\n";
}

std::string render_text(const ClassificationReport& r) {
  auto flagged = [](double v, bool undefined) { return fmt(v) + (undefined ? " (zero denominator)" : ""); };
  const auto& c = r.confusion;
  return table({{"n", std::to_string(r.n())},
                {"confusion", "actual 0: [" + std::to_string(c[0][0]) + " " + std::to_string(c[0][1]) +
                                  "]  actual 1: [" + std::to_string(c[1][0]) + " " + std::to_string(c[1][1]) + "]"},
                {"accuracy", fmt(r.accuracy)},
                {"precision", flagged(r.precision, r.precision_undefined)},
                {"recall", flagged(r.recall, r.recall_undefined)},
                {"F1", flagged(r.f1, r.f1_undefined)}});
}

std::string render_json(const ClassificationReport& r) {
  const auto& c = r.confusion;
  const nlohmann::json j{{"n", r.n()},
                         {"confusion", {{c[0][0], c[0][1]}, {c[1][0], c[1][1]}}},
                         {"accuracy", r.accuracy},
                         {"precision", r.precision},
                         {"recall", r.recall},
                         {"f1", r.f1},
                         {"precision_undefined", r.precision_undefined},
                         {"recall_undefined", r.recall_undefined},
                         {"f1_undefined", r.f1_undefined}};
  return j.dump(2) + "\n";
}

namespace {

struct ValueColumn {
  std::vector<std::string> keys;  // empty when the file has no key column
  std::vector<double> values;
};

ValueColumn read_value_column(const std::string& path, const std::string& key) {
  const auto records = csv::parse(read_text_file(path));
  if (records.empty()) throw InvalidArgument(path + ": missing header");
  const auto& header = records.front().fields;
  const auto key_it = std::find(header.begin(), header.end(), key);
  const bool keyed = key_it != header.end();
  const auto key_col = static_cast<std::size_t>(key_it - header.begin());
  std::size_t value_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!keyed || i != key_col) {
      value_col = i;
      break;
    }
  }
  if (value_col == header.size()) throw InvalidArgument(path + ": no value column");

  ValueColumn out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (!rec.error.empty()) throw InvalidArgument(path + ":" + std::to_string(rec.line) + ": " + rec.error);
    if (rec.fields.size() != header.size()) {
      throw InvalidArgument(path + ":" + std::to_string(rec.line) + ": expected " + std::to_string(header.size()) +
                            " fields");
    }
    const std::string& text = rec.fields[value_col];
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) {
      throw InvalidArgument(path + ":" + std::to_string(rec.line) + ": '" + text + "' is not a number");
    }
    if (keyed) out.keys.push_back(rec.fields[key_col]);
    out.values.push_back(v);
  }
  return out;
}

}  // namespace

PairedColumns read_paired_csv(const std::string& pred_path, const std::string& truth_path, const std::string& key) {
  const ValueColumn pred = read_value_column(pred_path, key);
  const ValueColumn truth = read_value_column(truth_path, key);
  PairedColumns out;
  if (!pred.keys.empty() || !truth.keys.empty()) {
    if (pred.keys.empty() != truth.keys.empty() && !(pred.values.empty() || truth.values.empty())) {
      throw InvalidArgument("only one of the files has a '" + key + "' column");
    }
    std::map<std::string, double> by_key;
    for (std::size_t i = 0; i < pred.keys.size(); ++i) {
      if (!by_key.emplace(pred.keys[i], pred.values[i]).second) {
        throw InvalidArgument(pred_path + ": duplicate key '" + pred.keys[i] + "'");
      }
    }
    for (std::size_t i = 0; i < truth.keys.size(); ++i) {
      const auto it = by_key.find(truth.keys[i]);
      if (it == by_key.end()) throw InvalidArgument("no prediction for key '" + truth.keys[i] + "'");
      out.keys.push_back(truth.keys[i]);
      out.truth.push_back(truth.values[i]);
      out.predicted.push_back(it->second);
    }
    if (out.keys.size() != by_key.size()) throw InvalidArgument("predictions contain keys absent from the truth file");
    return out;
  }
  if (pred.values.size() != truth.values.size()) {
    throw InvalidArgument("row count mismatch: " + std::to_string(pred.values.size()) + " predictions, " +
                          std::to_string(truth.values.size()) + " truths");
  }
  out.truth = truth.values;
  out.predicted = pred.values;
  return out;
}

}  // namespace lak::evalx
