#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lak/catalog.hpp"

namespace lak::forest {

enum class Task { Regression, BinaryClassification };
enum class SubsetStrategy { Auto, All, Sqrt, Log2, OneThird };

std::string_view to_string(Task t);
std::string_view to_string(SubsetStrategy s);
Task parse_task(std::string_view text);
SubsetStrategy parse_subset_strategy(std::string_view text);

struct ForestConfig {
  Task task = Task::Regression;
  std::size_t num_trees = 100;
  std::size_t max_depth = 8;
  std::size_t max_bins = 32;
  SubsetStrategy feature_subset_strategy = SubsetStrategy::Auto;
  std::map<std::size_t, std::size_t> categorical_features_info;  // feature index -> arity
  std::uint64_t seed = 0;
  std::optional<bool> bootstrap;  // unset: on iff num_trees > 1

  // Runtime knob, not part of the model: trees are trained on this many
  // threads. Results do not depend on it.
  std::size_t workers = 1;

  [[nodiscard]] bool use_bootstrap() const { return bootstrap.value_or(num_trees > 1); }

  // Features examined per node: auto is all for a single tree, else
  // ceil(sqrt(n)) for classification and ceil(n/3) for regression.
  [[nodiscard]] std::size_t features_per_node(std::size_t num_features) const;

  // Throws ConfigError naming the violated constraint.
  void validate(std::size_t num_features) const;
};

// 1 - sum p_i^2 over (possibly weighted) class counts.
double gini(std::span<const double> counts);

// Population variance.
double variance_impurity(std::span<const double> targets);

struct CandidateSplits {
  bool categorical = false;
  std::vector<double> thresholds;         // continuous: go left iff x <= t
  std::vector<std::int64_t> categories;   // categorical: go left iff code == c

  [[nodiscard]] std::size_t size() const { return categorical ? categories.size() : thresholds.size(); }
  [[nodiscard]] bool empty() const { return size() == 0; }
};

// Continuous (arity 0): with d distinct values, all but the largest when
// d <= max_bins, else the sample quantiles v[floor(i*n/max_bins) - 1],
// i = 1..max_bins-1, of the sorted column, deduplicated and excluding the
// maximum. Categorical: one one-vs-rest candidate per level.
CandidateSplits build_bins(std::span<const double> column, std::size_t max_bins, std::size_t arity = 0);

struct Node {
  std::int32_t feature = -1;  // -1 for leaves
  double threshold = 0;       // continuous splits
  std::int64_t category = -1; // categorical splits
  std::int32_t left = -1;
  std::int32_t right = -1;
  double prediction = 0;      // leaves only

  [[nodiscard]] bool is_leaf() const { return feature < 0; }
  friend bool operator==(const Node&, const Node&) = default;
};

// Nodes in pre-order; node 0 is the root.
struct Tree {
  std::vector<Node> nodes;

  [[nodiscard]] double predict(std::span<const double> features) const;
  [[nodiscard]] std::size_t depth() const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

class ForestModel {
 public:
  ForestConfig config;
  std::vector<Tree> trees;
  std::vector<catalog::FeatureDef> features;
  std::string target_name;
  std::string training_digest;  // 16 hex digits

  // Regression: mean of tree outputs. Classification: majority vote, ties
  // to class 0. Throws InvalidArgument on a length mismatch.
  [[nodiscard]] double predict(std::span<const double> features) const;
  [[nodiscard]] std::vector<double> predict(std::span<const catalog::LabeledRow> rows) const;

  [[nodiscard]] std::size_t num_features() const { return features.size(); }
};

// Multiplicity of each of n rows in tree `tree_index`'s bootstrap sample:
// n draws with replacement from that tree's stream. Sums to n.
std::vector<std::uint32_t> bootstrap_counts(std::size_t n, std::uint64_t seed, std::size_t tree_index);

// `features` names the columns (and supplies categorical dictionaries); when
// empty, names f0..f{n-1} are generated from config.categorical_features_info.
// Bit-reproducible for fixed (rows, config), independent of row order and of
// config.workers.
ForestModel train(std::span<const catalog::LabeledRow> rows, const ForestConfig& config,
                  std::vector<catalog::FeatureDef> features = {}, std::string target_name = "target");

// Model file: JSON document, format "rf-1".
inline constexpr std::string_view kModelFormat = "rf-1";

std::string serialize_model(const ForestModel& model);
ForestModel deserialize_model(std::string_view text);
void save_model(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

}  // namespace lak::forest
