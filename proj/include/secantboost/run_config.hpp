#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "secantboost/booster.hpp"
#include "secantboost/loss.hpp"

namespace secantboost {

struct RunConfig {
  std::string loss = "logistic";
  LossParams loss_params;
  /// Piecewise-linear loss table; replaces `loss` when set.
  std::string loss_table;
  std::size_t T = 50;
  std::size_t max_nodes = 1;
  double delta_init = 1.0;
  double epsilon = 0.1;
  std::size_t precision_Z = 64;
  double noise_eta = 0.0;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::string label_column;
  bool force_find_alpha = false;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
  BoostConfig boost_config() const;
  Loss make_loss() const;
};

/// Seed from the SECANTBOOST_SEED environment variable, or 0.
std::uint64_t default_seed();

}  // namespace secantboost
