#include <nlohmann/json.hpp>

#include "lak/error.hpp"
#include "lak/fileio.hpp"
#include "lak/forest.hpp"
#include "lak/hash.hpp"

namespace lak::forest {
namespace {

using nlohmann::json;

json node_to_json(const Tree& tree, std::size_t i) {
  const Node& n = tree.nodes.at(i);
  if (n.is_leaf()) return json{{"leaf", n.prediction}};
  json split{{"feature", n.feature}};
  if (n.category >= 0) {
    split["category"] = n.category;
  } else {
    split["threshold"] = n.threshold;
  }
  return json{{"split", split},
              {"left", node_to_json(tree, static_cast<std::size_t>(n.left))},
              {"right", node_to_json(tree, static_cast<std::size_t>(n.right))}};
}

std::int32_t node_from_json(const json& j, Tree& tree, std::size_t depth) {
  if (depth > 4096) throw CorruptFileError("model tree nesting is too deep");
  const auto id = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.push_back(Node{});
  if (j.contains("leaf")) {
    tree.nodes[id].prediction = j.at("leaf").get<double>();
    return id;
  }
  const json& split = j.at("split");
  Node n;
  n.feature = split.at("feature").get<std::int32_t>();
  if (n.feature < 0) throw CorruptFileError("model split has a negative feature index");
  if (split.contains("category")) {
    n.category = split.at("category").get<std::int64_t>();
  } else {
    n.threshold = split.at("threshold").get<double>();
  }
  n.left = node_from_json(j.at("left"), tree, depth + 1);
  n.right = node_from_json(j.at("right"), tree, depth + 1);
  tree.nodes[id] = n;
  return id;
}

}  // namespace

std::string serialize_model(const ForestModel& model) {
  const ForestConfig& c = model.config;
  json categorical = json::object();
  for (const auto& [f, arity] : c.categorical_features_info) categorical[std::to_string(f)] = arity;
  json config{{"task", to_string(c.task)},
              {"num_trees", c.num_trees},
              {"max_depth", c.max_depth},
              {"max_bins", c.max_bins},
              {"feature_subset_strategy", to_string(c.feature_subset_strategy)},
              {"categorical_features_info", categorical},
              {"seed", std::to_string(c.seed)},
              {"bootstrap", c.use_bootstrap()}};

  json features = json::array();
  for (const auto& f : model.features) {
    json def{{"name", f.name}, {"kind", f.kind == catalog::FeatureKind::Categorical ? "categorical" : "continuous"}};
    if (f.kind == catalog::FeatureKind::Categorical) def["levels"] = f.levels;
    features.push_back(std::move(def));
  }

  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));

  const json doc{{"format", kModelFormat},
                 {"config", std::move(config)},
                 {"features", std::move(features)},
                 {"target", model.target_name},
                 {"training_digest", model.training_digest},
                 {"trees", std::move(trees)}};
  return doc.dump() + "\n";
}

ForestModel deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CorruptFileError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format")) throw CorruptFileError("model file has no format field");
  const auto format = doc.at("format").get<std::string>();
  if (format != kModelFormat) {
    throw VersionError("model format '" + format + "' is not supported (expected " + std::string(kModelFormat) + ")");
  }

  try {
    ForestModel m;
    const json& c = doc.at("config");
    m.config.task = parse_task(c.at("task").get<std::string>());
    m.config.num_trees = c.at("num_trees").get<std::size_t>();
    m.config.max_depth = c.at("max_depth").get<std::size_t>();
    m.config.max_bins = c.at("max_bins").get<std::size_t>();
    m.config.feature_subset_strategy = parse_subset_strategy(c.at("feature_subset_strategy").get<std::string>());
    for (const auto& [k, v] : c.at("categorical_features_info").items()) {
      m.config.categorical_features_info.emplace(std::stoull(k), v.get<std::size_t>());
    }
    m.config.seed = std::stoull(c.at("seed").get<std::string>());
    m.config.bootstrap = c.at("bootstrap").get<bool>();

    for (const auto& f : doc.at("features")) {
      catalog::FeatureDef def;
      def.name = f.at("name").get<std::string>();
      const auto kind = f.at("kind").get<std::string>();
      if (kind == "categorical") {
        def.kind = catalog::FeatureKind::Categorical;
        def.levels = f.at("levels").get<std::vector<std::string>>();
      } else if (kind != "continuous") {
        throw CorruptFileError("unknown feature kind '" + kind + "'");
      }
      m.features.push_back(std::move(def));
    }
    m.target_name = doc.at("target").get<std::string>();
    m.training_digest = doc.at("training_digest").get<std::string>();
    (void)from_hex(m.training_digest);

    for (const auto& t : doc.at("trees")) {
      Tree tree;
      node_from_json(t, tree, 0);
      for (const Node& n : tree.nodes) {
        if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= m.features.size()) {
          throw CorruptFileError("model split references feature " + std::to_string(n.feature));
        }
      }
      m.trees.push_back(std::move(tree));
    }
    if (m.trees.size() != m.config.num_trees) throw CorruptFileError("model tree count does not match num_trees");
    m.config.validate(m.features.size());
    return m;
  } catch (const json::exception& e) {
    throw CorruptFileError(std::string("model file is malformed: ") + e.what());
  } catch (const ConfigError& e) {
    throw CorruptFileError(std::string("model file has an invalid config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw CorruptFileError(std::string("model file is malformed: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CorruptFileError(std::string("model file has a malformed number: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw CorruptFileError(std::string("model file has an out-of-range number: ") + e.what());
  }
}

void save_model(const ForestModel& model, const std::filesystem::path& path) {
  write_text_file(path, serialize_model(model));
}

ForestModel load_model(const std::filesystem::path& path) { return deserialize_model(read_text_file(path)); }

}  // namespace lak::forest
