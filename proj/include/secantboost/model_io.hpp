#pragma once

#include <string>

#include <json.hpp>

#include "secantboost/ensemble.hpp"
#include "secantboost/loss.hpp"
#include "secantboost/run_config.hpp"

namespace secantboost {

inline constexpr int kModelFormatVersion = 1;

struct Model {
  Ensemble ensemble;
  RunConfig config;
  /// Table breakpoints when the loss was a table loss, so the model is
  /// self-contained.
  std::vector<std::pair<double, double>> loss_table;
  double v0 = 0.0;
  std::vector<FeatureSchema> schema;

  Loss loss() const;
};

nlohmann::json config_to_json(const RunConfig& c);
/// Reads the fields present in `j` over `base`; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

nlohmann::json tree_to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const nlohmann::json& j, std::vector<FeatureSchema> schema);

nlohmann::json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);

void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace secantboost
