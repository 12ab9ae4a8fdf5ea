#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "lak/error.hpp"
#include "lak/experiment.hpp"
#include "lak/fileio.hpp"

namespace lak::experiment {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError(key + ": '" + v + "' is not a number");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  }
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

LabConfig LabConfig::parse(std::string_view text, const std::filesystem::path& base_dir) {
  LabConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto size = [](std::size_t& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = static_cast<std::size_t>(to_u64(k, v)); };
  };
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = to_double(k, v); };
  };
  auto seed = [](std::uint64_t& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = to_u64(k, v); };
  };
  const std::map<std::string, Setter> setters = {
      {"n_students", size(c.generator.n_students)},
      {"response_rate", real(c.generator.response_rate)},
      {"p_negative", real(c.generator.p_negative)},
      {"p_neutral", real(c.generator.p_neutral)},
      {"p_positive", real(c.generator.p_positive)},
      {"effect_delta", real(c.generator.effect_delta)},
      {"noise_sigma", real(c.generator.noise_sigma)},
      {"generator_seed", seed(c.generator.seed)},
      {"train_fraction", real(c.split.train_fraction)},
      {"split_seed", seed(c.split.seed)},
      {"num_trees", size(c.forest.num_trees)},
      {"max_depth", size(c.forest.max_depth)},
      {"max_bins", size(c.forest.max_bins)},
      {"feature_subset_strategy",
       [&c](const std::string&, const std::string& v) { c.forest.feature_subset_strategy = forest::parse_subset_strategy(v); }},
      {"forest_seed", seed(c.forest.seed)},
      {"bootstrap",
       [&c](const std::string& k, const std::string& v) {
         if (v == "auto") {
           c.forest.bootstrap.reset();
         } else if (v == "true") {
           c.forest.bootstrap = true;
         } else if (v == "false") {
           c.forest.bootstrap = false;
         } else {
           throw ConfigError(k + ": expected true, false or auto");
         }
       }},
      {"forest_workers", size(c.forest.workers)},
      {"partitions", size(c.parallel.partitions)},
      {"workers", size(c.parallel.workers)},
      {"join", [&c](const std::string&, const std::string& v) { c.join = parse_join_policy(v); }},
      {"seeds", size(c.seeds)},
      {"seed_workers", size(c.seed_workers)},
      {"lexicon",
       [&c, &base_dir](const std::string&, const std::string& v) {
         const std::filesystem::path p(v);
         c.lexicon = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
       }},
  };

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    try {
      it->second(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  c.generator.validate();
  if (!(c.split.train_fraction > 0 && c.split.train_fraction < 1)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (c.parallel.partitions == 0) throw ConfigError("partitions must be positive");
  if (c.seeds == 0) throw ConfigError("seeds must be positive");
  return c;
}

LabConfig LabConfig::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.parent_path());
}

std::vector<std::pair<std::string, std::string>> LabConfig::echo() const {
  return {
      {"n_students", std::to_string(generator.n_students)},
      {"response_rate", num(generator.response_rate)},
      {"p_negative", num(generator.p_negative)},
      {"p_neutral", num(generator.p_neutral)},
      {"p_positive", num(generator.p_positive)},
      {"effect_delta", num(generator.effect_delta)},
      {"noise_sigma", num(generator.noise_sigma)},
      {"generator_seed", std::to_string(generator.seed)},
      {"train_fraction", num(split.train_fraction)},
      {"split_seed", std::to_string(split.seed)},
      {"num_trees", std::to_string(forest.num_trees)},
      {"max_depth", std::to_string(forest.max_depth)},
      {"max_bins", std::to_string(forest.max_bins)},
      {"feature_subset_strategy", std::string(forest::to_string(forest.feature_subset_strategy))},
      {"forest_seed", std::to_string(forest.seed)},
      {"bootstrap", forest.bootstrap ? (*forest.bootstrap ? "true" : "false") : "auto"},
      {"partitions", std::to_string(parallel.partitions)},
      {"workers", std::to_string(parallel.workers)},
      {"join", std::string(to_string(join))},
      {"seeds", std::to_string(seeds)},
  };
}

}  // namespace lak::experiment
