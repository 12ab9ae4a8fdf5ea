#include "lak/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lak/error.hpp"
#include "lak/executor.hpp"
#include "lak/hash.hpp"
#include "lak/random.hpp"

namespace lak::forest {
namespace {

// Column-major binned view of the training rows in canonical order.
struct BinnedData {
  std::size_t rows = 0;
  std::size_t features = 0;
  std::vector<CandidateSplits> candidates;   // per feature
  std::vector<std::uint32_t> bins;           // feature * rows + row
  std::vector<std::uint32_t> bin_count;      // bins per feature
  std::vector<double> targets;

  [[nodiscard]] std::uint32_t bin(std::size_t feature, std::size_t row) const { return bins[feature * rows + row]; }
};

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  std::size_t candidate = 0;
  double gain = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const BinnedData& data, const ForestConfig& config, std::vector<std::uint32_t> weights,
              std::uint64_t root_seed)
      : data_(data), config_(config), weights_(std::move(weights)), root_seed_(root_seed) {
    k_ = config_.features_per_node(data_.features);
  }

  Tree build() {
    std::vector<std::uint32_t> members;
    for (std::size_t i = 0; i < data_.rows; ++i) {
      if (weights_[i] > 0) members.push_back(static_cast<std::uint32_t>(i));
    }
    grow(members, 0, root_seed_);
    return std::move(tree_);
  }

 private:
  struct Stats {
    double w = 0, sum = 0, sumsq = 0, c0 = 0, c1 = 0;
    void add(double weight, double y) {
      w += weight;
      sum += weight * y;
      sumsq += weight * y * y;
      (y == 0.0 ? c0 : c1) += weight;
    }
  };

  [[nodiscard]] bool classification() const { return config_.task == Task::BinaryClassification; }

  // Impurity times node weight, so gains compare without division.
  [[nodiscard]] double weighted_impurity(const Stats& s) const {
    if (s.w <= 0) return 0;
    if (classification()) {
      const double p0 = s.c0 / s.w, p1 = s.c1 / s.w;
      return s.w * (1.0 - p0 * p0 - p1 * p1);
    }
    return std::max(0.0, s.sumsq - s.sum * s.sum / s.w);
  }

  [[nodiscard]] double leaf_value(const Stats& s) const {
    if (classification()) return s.c1 > s.c0 ? 1.0 : 0.0;
    return s.sum / s.w;
  }

  std::vector<std::size_t> pick_features(std::uint64_t node_seed) const {
    std::vector<std::size_t> idx(data_.features);
    std::iota(idx.begin(), idx.end(), 0);
    if (k_ < idx.size()) {
      SplitMix64 rng(node_seed);
      for (std::size_t i = 0; i < k_; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.bounded(idx.size() - i));
        std::swap(idx[i], idx[j]);
      }
      idx.resize(k_);
      std::sort(idx.begin(), idx.end());
    }
    return idx;
  }

  SplitChoice best_split(const std::vector<std::uint32_t>& members, const Stats& parent,
                         std::uint64_t node_seed) const {
    SplitChoice best;
    const double parent_imp = weighted_impurity(parent);
    std::vector<Stats> hist;
    for (const std::size_t f : pick_features(node_seed)) {
      const CandidateSplits& cand = data_.candidates[f];
      if (cand.empty()) continue;
      hist.assign(data_.bin_count[f], Stats{});
      for (const std::uint32_t r : members) hist[data_.bin(f, r)].add(weights_[r], data_.targets[r]);

      Stats left;
      for (std::size_t c = 0; c < cand.size(); ++c) {
        if (cand.categorical) {
          left = hist[static_cast<std::size_t>(cand.categories[c])];
        } else {
          const Stats& b = hist[c];
          left.w += b.w;
          left.sum += b.sum;
          left.sumsq += b.sumsq;
          left.c0 += b.c0;
          left.c1 += b.c1;
        }
        Stats right;
        right.w = parent.w - left.w;
        right.sum = parent.sum - left.sum;
        right.sumsq = parent.sumsq - left.sumsq;
        right.c0 = parent.c0 - left.c0;
        right.c1 = parent.c1 - left.c1;
        if (left.w <= 0 || right.w <= 0) continue;
        const double gain = (parent_imp - weighted_impurity(left) - weighted_impurity(right)) / parent.w;
        if (gain > best.gain) {
          best = {true, f, c, gain};
        }
      }
    }
    return best;
  }

  std::int32_t grow(std::vector<std::uint32_t>& members, std::size_t depth, std::uint64_t node_seed) {
    Stats stats;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const std::uint32_t r : members) {
      stats.add(weights_[r], data_.targets[r]);
      lo = std::min(lo, data_.targets[r]);
      hi = std::max(hi, data_.targets[r]);
    }
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back(Node{});
    tree_.nodes[id].prediction = leaf_value(stats);

    const bool pure = lo == hi;
    if (pure || depth >= config_.max_depth || stats.w < 2.0) return id;

    const SplitChoice split = best_split(members, stats, node_seed);
    if (!split.found) return id;

    const CandidateSplits& cand = data_.candidates[split.feature];
    std::vector<std::uint32_t> left, right;
    for (const std::uint32_t r : members) {
      const std::uint32_t b = data_.bin(split.feature, r);
      const bool go_left = cand.categorical ? static_cast<std::int64_t>(b) == cand.categories[split.candidate]
                                            : b <= split.candidate;
      (go_left ? left : right).push_back(r);
    }
    members.clear();
    members.shrink_to_fit();

    Node& node = tree_.nodes[id];
    node.feature = static_cast<std::int32_t>(split.feature);
    node.prediction = 0;
    if (cand.categorical) {
      node.category = cand.categories[split.candidate];
    } else {
      node.threshold = cand.thresholds[split.candidate];
    }
    const std::int32_t l = grow(left, depth + 1, derive_seed(node_seed, 0));
    const std::int32_t r = grow(right, depth + 1, derive_seed(node_seed, 1));
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  const BinnedData& data_;
  const ForestConfig& config_;
  std::vector<std::uint32_t> weights_;
  std::uint64_t root_seed_;
  std::size_t k_ = 1;
  Tree tree_;
};

std::uint32_t bin_of(const CandidateSplits& cand, double x) {
  if (cand.categorical) return static_cast<std::uint32_t>(x);
  const auto it = std::lower_bound(cand.thresholds.begin(), cand.thresholds.end(), x);
  return static_cast<std::uint32_t>(it - cand.thresholds.begin());
}

std::string digest_training(const std::vector<const catalog::LabeledRow*>& rows, const ForestConfig& c) {
  Fnv1a64 h;
  h.update_u64(rows.size());
  for (const auto* r : rows) {
    h.update_u64(r->features.size());
    for (double x : r->features) h.update_f64(x);
    h.update_f64(r->target);
  }
  h.update_u64(static_cast<std::uint64_t>(c.task));
  h.update_u64(c.num_trees);
  h.update_u64(c.max_depth);
  h.update_u64(c.max_bins);
  h.update_u64(static_cast<std::uint64_t>(c.feature_subset_strategy));
  h.update_u64(c.seed);
  h.update_u64(c.use_bootstrap() ? 1 : 0);
  for (const auto& [f, arity] : c.categorical_features_info) {
    h.update_u64(f);
    h.update_u64(arity);
  }
  return to_hex(h.digest());
}

}  // namespace

std::string_view to_string(Task t) { return t == Task::Regression ? "regression" : "binary_classification"; }

std::string_view to_string(SubsetStrategy s) {
  switch (s) {
    case SubsetStrategy::Auto: return "auto";
    case SubsetStrategy::All: return "all";
    case SubsetStrategy::Sqrt: return "sqrt";
    case SubsetStrategy::Log2: return "log2";
    case SubsetStrategy::OneThird: return "onethird";
  }
  return "?";
}

Task parse_task(std::string_view text) {
  if (text == "regression") return Task::Regression;
  if (text == "binary_classification" || text == "classification") return Task::BinaryClassification;
  throw ConfigError("unknown task '" + std::string(text) + "'");
}

SubsetStrategy parse_subset_strategy(std::string_view text) {
  if (text == "auto") return SubsetStrategy::Auto;
  if (text == "all") return SubsetStrategy::All;
  if (text == "sqrt") return SubsetStrategy::Sqrt;
  if (text == "log2") return SubsetStrategy::Log2;
  if (text == "onethird") return SubsetStrategy::OneThird;
  throw ConfigError("unknown feature subset strategy '" + std::string(text) + "'");
}

std::size_t ForestConfig::features_per_node(std::size_t n) const {
  if (n == 0) return 0;
  const auto nd = static_cast<double>(n);
  double k = nd;
  switch (feature_subset_strategy) {
    case SubsetStrategy::All: k = nd; break;
    case SubsetStrategy::Sqrt: k = std::ceil(std::sqrt(nd)); break;
    case SubsetStrategy::Log2: k = std::ceil(std::log2(nd)); break;
    case SubsetStrategy::OneThird: k = std::ceil(nd / 3.0); break;
    case SubsetStrategy::Auto:
      if (num_trees == 1) {
        k = nd;
      } else if (task == Task::BinaryClassification) {
        k = std::ceil(std::sqrt(nd));
      } else {
        k = std::ceil(nd / 3.0);
      }
      break;
  }
  return std::clamp<std::size_t>(static_cast<std::size_t>(k), 1, n);
}

void ForestConfig::validate(std::size_t num_features) const {
  if (num_trees < 1) throw ConfigError("num_trees must be at least 1");
  if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
  if (max_bins < 2) throw ConfigError("max_bins must be at least 2");
  if (num_features < 1) throw ConfigError("rows have no features");
  for (const auto& [f, arity] : categorical_features_info) {
    if (f >= num_features) {
      throw ConfigError("categorical feature index " + std::to_string(f) + " is out of range");
    }
    if (arity < 1) throw ConfigError("categorical feature " + std::to_string(f) + " has arity 0");
    if (arity > max_bins) {
      throw ConfigError("categorical feature " + std::to_string(f) + " has arity " + std::to_string(arity) +
                        " > max_bins " + std::to_string(max_bins));
    }
  }
}

double gini(std::span<const double> counts) {
  double total = 0;
  for (double c : counts) {
    if (!(c >= 0)) throw InvalidArgument("class counts must be non-negative");
    total += c;
  }
  if (total <= 0) throw InvalidArgument("gini of all-zero class counts is undefined");
  double sq = 0;
  for (double c : counts) sq += (c / total) * (c / total);
  return 1.0 - sq;
}

double variance_impurity(std::span<const double> targets) {
  if (targets.empty()) throw InvalidArgument("variance of an empty target set is undefined");
  double mean = 0;
  for (double y : targets) mean += y;
  mean /= static_cast<double>(targets.size());
  double ss = 0;
  for (double y : targets) ss += (y - mean) * (y - mean);
  return ss / static_cast<double>(targets.size());
}

CandidateSplits build_bins(std::span<const double> column, std::size_t max_bins, std::size_t arity) {
  if (column.empty()) throw InvalidArgument("cannot bin an empty column");
  if (max_bins < 2) throw ConfigError("max_bins must be at least 2");
  CandidateSplits out;
  if (arity > 0) {
    if (arity > max_bins) {
      throw ConfigError("categorical arity " + std::to_string(arity) + " exceeds max_bins " + std::to_string(max_bins));
    }
    out.categorical = true;
    for (std::size_t c = 0; c < arity; ++c) out.categories.push_back(static_cast<std::int64_t>(c));
    return out;
  }

  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() <= 1) return out;

  const double max_value = distinct.back();
  if (distinct.size() <= max_bins) {
    out.thresholds.assign(distinct.begin(), distinct.end() - 1);
    return out;
  }
  const std::size_t n = sorted.size();
  for (std::size_t i = 1; i < max_bins; ++i) {
    const std::size_t pos = i * n / max_bins;
    if (pos == 0) continue;
    const double t = sorted[pos - 1];
    if (t >= max_value) continue;
    if (out.thresholds.empty() || out.thresholds.back() != t) out.thresholds.push_back(t);
  }
  return out;
}

double Tree::predict(std::span<const double> features) const {
  std::size_t i = 0;
  for (;;) {
    const Node& n = nodes[i];
    if (n.is_leaf()) return n.prediction;
    const double x = features[static_cast<std::size_t>(n.feature)];
    const bool left = n.category >= 0 ? static_cast<std::int64_t>(x) == n.category && x == std::floor(x)
                                      : x <= n.threshold;
    i = static_cast<std::size_t>(left ? n.left : n.right);
  }
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const Node& n = nodes[i];
    if (!n.is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
    }
  }
  return best;
}

double ForestModel::predict(std::span<const double> x) const {
  if (x.size() != features.size()) {
    throw InvalidArgument("feature vector has length " + std::to_string(x.size()) + ", model expects " +
                          std::to_string(features.size()));
  }
  if (trees.empty()) throw InvalidArgument("model has no trees");
  if (config.task == Task::BinaryClassification) {
    std::size_t ones = 0;
    for (const auto& t : trees) ones += t.predict(x) == 1.0 ? 1 : 0;
    return 2 * ones > trees.size() ? 1.0 : 0.0;
  }
  double sum = 0;
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::predict(std::span<const catalog::LabeledRow> rows) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(predict(r.features));
  return out;
}

std::vector<std::uint32_t> bootstrap_counts(std::size_t n, std::uint64_t seed, std::size_t tree_index) {
  std::vector<std::uint32_t> counts(n, 0);
  SplitMix64 rng(derive_seed(derive_seed(seed, tree_index), 0));
  for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(rng.bounded(n))];
  return counts;
}

ForestModel train(std::span<const catalog::LabeledRow> rows, const ForestConfig& config_in,
                  std::vector<catalog::FeatureDef> features, std::string target_name) {
  if (rows.size() < 2) throw InvalidArgument("training needs at least 2 rows, got " + std::to_string(rows.size()));
  const std::size_t nf = rows.front().features.size();
  for (const auto& r : rows) {
    if (r.features.size() != nf) throw InvalidArgument("training rows have differing feature counts");
    if (!std::isfinite(r.target)) throw InvalidArgument("training target is not finite");
    for (double x : r.features) {
      if (!std::isfinite(x)) throw InvalidArgument("training feature value is not finite");
    }
  }

  ForestConfig config = config_in;
  if (!features.empty()) {
    if (features.size() != nf) {
      throw InvalidArgument("feature metadata names " + std::to_string(features.size()) + " features, rows have " +
                            std::to_string(nf));
    }
    std::map<std::size_t, std::size_t> info;
    for (std::size_t f = 0; f < nf; ++f) {
      if (features[f].kind == catalog::FeatureKind::Categorical) info.emplace(f, features[f].arity());
    }
    if (config.categorical_features_info.empty()) {
      config.categorical_features_info = info;
    } else if (config.categorical_features_info != info) {
      throw ConfigError("categorical_features_info disagrees with the feature metadata");
    }
  } else {
    for (std::size_t f = 0; f < nf; ++f) {
      catalog::FeatureDef def{"f" + std::to_string(f), catalog::FeatureKind::Continuous, {}};
      if (const auto it = config.categorical_features_info.find(f); it != config.categorical_features_info.end()) {
        def.kind = catalog::FeatureKind::Categorical;
        for (std::size_t c = 0; c < it->second; ++c) def.levels.push_back(std::to_string(c));
      }
      features.push_back(std::move(def));
    }
  }
  config.validate(nf);

  for (const auto& r : rows) {
    if (config.task == Task::BinaryClassification && r.target != 0.0 && r.target != 1.0) {
      throw InvalidArgument("binary classification targets must be 0 or 1");
    }
    for (const auto& [f, arity] : config.categorical_features_info) {
      const double x = r.features[f];
      if (x != std::floor(x) || x < 0 || x >= static_cast<double>(arity)) {
        throw InvalidArgument("categorical feature " + std::to_string(f) + " has value outside [0, " +
                              std::to_string(arity) + ")");
      }
    }
  }

  // Canonical row order makes training independent of input order.
  std::vector<const catalog::LabeledRow*> canon;
  canon.reserve(rows.size());
  for (const auto& r : rows) canon.push_back(&r);
  std::stable_sort(canon.begin(), canon.end(), [](const catalog::LabeledRow* a, const catalog::LabeledRow* b) {
    if (a->features != b->features) return a->features < b->features;
    return a->target < b->target;
  });

  BinnedData data;
  data.rows = canon.size();
  data.features = nf;
  data.targets.reserve(data.rows);
  for (const auto* r : canon) data.targets.push_back(r->target);
  data.bins.resize(nf * data.rows);
  std::vector<double> column(data.rows);
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t i = 0; i < data.rows; ++i) column[i] = canon[i]->features[f];
    const auto it = config.categorical_features_info.find(f);
    const std::size_t arity = it == config.categorical_features_info.end() ? 0 : it->second;
    data.candidates.push_back(build_bins(column, config.max_bins, arity));
    const CandidateSplits& cand = data.candidates.back();
    data.bin_count.push_back(static_cast<std::uint32_t>(cand.categorical ? arity : cand.thresholds.size() + 1));
    for (std::size_t i = 0; i < data.rows; ++i) data.bins[f * data.rows + i] = bin_of(cand, column[i]);
  }

  ForestModel model;
  model.config = config;
  model.features = std::move(features);
  model.target_name = std::move(target_name);
  model.training_digest = digest_training(canon, config);
  model.trees.resize(config.num_trees);

  Executor(config.workers).run(config.num_trees, [&](std::size_t t) {
    std::vector<std::uint32_t> weights = config.use_bootstrap() ? bootstrap_counts(data.rows, config.seed, t)
                                                                : std::vector<std::uint32_t>(data.rows, 1);
    TreeBuilder builder(data, config, std::move(weights), derive_seed(derive_seed(config.seed, t), 1));
    model.trees[t] = builder.build();
  });
  return model;
}

}  // namespace lak::forest
