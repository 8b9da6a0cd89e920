#include "secantboost/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "secantboost/error.hpp"

namespace secantboost {

using nlohmann::json;

namespace {

json node_to_json(const std::vector<TreeNode>& nodes, std::size_t k) {
  const TreeNode& n = nodes[k];
  if (n.is_leaf()) return json{{"value", n.value}};
  json j{{"feature", n.feature}};
  if (n.categorical)
    j["level"] = n.level;
  else
    j["threshold"] = n.threshold;
  j["left"] = node_to_json(nodes, static_cast<std::size_t>(n.left));
  j["right"] = node_to_json(nodes, static_cast<std::size_t>(n.right));
  return j;
}

int node_from_json(const json& j, std::vector<TreeNode>& nodes, const std::vector<FeatureSchema>& schema, int depth) {
  if (depth > 10000) throw DataError("tree is too deep");
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("value")) {
    nodes[static_cast<std::size_t>(index)].value = j.at("value").get<double>();
    return index;
  }
  TreeNode n;
  n.feature = j.at("feature").get<int>();
  if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= schema.size()) throw DataError("tree tests an unknown feature");
  n.categorical = schema[static_cast<std::size_t>(n.feature)].kind == FeatureKind::categorical;
  if (n.categorical)
    n.level = j.at("level").get<std::string>();
  else
    n.threshold = j.at("threshold").get<double>();
  n.left = node_from_json(j.at("left"), nodes, schema, depth + 1);
  n.right = node_from_json(j.at("right"), nodes, schema, depth + 1);
  nodes[static_cast<std::size_t>(index)] = n;
  return index;
}

}  // namespace

json config_to_json(const RunConfig& c) {
  return json{{"loss", c.loss},
              {"loss_params", c.loss_params},
              {"loss_table", c.loss_table},
              {"T", c.T},
              {"max_nodes", c.max_nodes},
              {"delta_init", c.delta_init},
              {"epsilon", c.epsilon},
              {"precision_Z", c.precision_Z},
              {"noise_eta", c.noise_eta},
              {"folds", c.folds},
              {"seed", c.seed},
              {"label_column", c.label_column},
              {"force_find_alpha", c.force_find_alpha}};
}

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"loss",      "loss_params", "loss_table", "T",    "max_nodes",
                                           "delta_init", "epsilon",    "precision_Z", "noise_eta", "folds",
                                           "seed",      "label_column", "force_find_alpha"};
  try {
    for (const auto& [key, value] : j.items())
      if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (j.contains("loss")) c.loss = j.at("loss").get<std::string>();
    if (j.contains("loss_params")) c.loss_params = j.at("loss_params").get<LossParams>();
    if (j.contains("loss_table")) c.loss_table = j.at("loss_table").get<std::string>();
    if (j.contains("T")) c.T = j.at("T").get<std::size_t>();
    if (j.contains("max_nodes")) c.max_nodes = j.at("max_nodes").get<std::size_t>();
    if (j.contains("delta_init")) c.delta_init = j.at("delta_init").get<double>();
    if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
    if (j.contains("precision_Z")) c.precision_Z = j.at("precision_Z").get<std::size_t>();
    if (j.contains("noise_eta")) c.noise_eta = j.at("noise_eta").get<double>();
    if (j.contains("folds")) c.folds = j.at("folds").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("label_column")) c.label_column = j.at("label_column").get<std::string>();
    if (j.contains("force_find_alpha")) c.force_find_alpha = j.at("force_find_alpha").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return c;
}

json tree_to_json(const DecisionTree& tree) { return node_to_json(tree.nodes(), 0); }

DecisionTree tree_from_json(const json& j, std::vector<FeatureSchema> schema) {
  std::vector<TreeNode> nodes;
  node_from_json(j, nodes, schema, 0);
  return DecisionTree(std::move(nodes), std::move(schema));
}

Loss Model::loss() const {
  if (!loss_table.empty()) return make_piecewise_linear(loss_table);
  return make_loss(config.loss, config.loss_params);
}

json model_to_json(const Model& m) {
  json schema = json::array();
  for (const FeatureSchema& f : m.schema)
    schema.push_back({{"name", f.name}, {"kind", f.kind == FeatureKind::numeric ? "numeric" : "categorical"}});
  json terms = json::array();
  for (const EnsembleTerm& t : m.ensemble.terms) terms.push_back({{"alpha", t.alpha}, {"tree", tree_to_json(t.tree)}});
  json j{{"format", "secantboost-model"},
         {"version", kModelFormatVersion},
         {"h0", m.ensemble.h0},
         {"v0", m.v0},
         {"seed", m.config.seed},
         {"config", config_to_json(m.config)},
         {"schema", schema},
         {"terms", terms}};
  if (!m.loss_table.empty()) j["loss_table"] = m.loss_table;
  return j;
}

Model model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "secantboost-model") throw DataError("not a model file");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw DataError("unsupported model version " + std::to_string(j.at("version").get<int>()));
    Model m;
    m.config = config_from_json(j.at("config"));
    m.ensemble.h0 = j.at("h0").get<double>();
    m.v0 = j.at("v0").get<double>();
    for (const json& f : j.at("schema")) {
      const std::string kind = f.at("kind").get<std::string>();
      if (kind != "numeric" && kind != "categorical") throw DataError("unknown feature kind '" + kind + "'");
      m.schema.push_back({f.at("name").get<std::string>(), kind == "numeric" ? FeatureKind::numeric : FeatureKind::categorical});
    }
    for (const json& t : j.at("terms"))
      m.ensemble.terms.push_back({t.at("alpha").get<double>(), tree_from_json(t.at("tree"), m.schema)});
    if (j.contains("loss_table")) m.loss_table = j.at("loss_table").get<std::vector<std::pair<double, double>>>();
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << model_to_json(m).dump(2) << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  try {
    return model_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw DataError("model '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace secantboost
