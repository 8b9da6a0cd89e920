#include "secantboost/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "secantboost/error.hpp"

namespace secantboost {

void RunConfig::validate() const {
  if (loss.empty() && loss_table.empty()) throw ConfigError("no loss given");
  if (T < 1 || T > 1000000) throw ConfigError("T must lie in [1, 1000000]");
  if (max_nodes < 1 || max_nodes > 4096) throw ConfigError("max_nodes must lie in [1, 4096]");
  if (!(delta_init > 0.0) || !std::isfinite(delta_init)) throw ConfigError("delta_init must be a positive real");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be a positive real");
  if (precision_Z < 2 || precision_Z > (1u << 20)) throw ConfigError("precision_Z must lie in [2, 2^20]");
  if (!(noise_eta >= 0.0 && noise_eta < 0.5)) throw ConfigError("noise_eta must lie in [0, 0.5)");
  if (folds < 2) throw ConfigError("folds must be at least 2");
  for (const auto& [k, v] : loss_params)
    if (!std::isfinite(v)) throw ConfigError("loss parameter '" + k + "' must be finite");
}

BoostConfig RunConfig::boost_config() const {
  BoostConfig b;
  b.T = T;
  b.max_nodes = max_nodes;
  b.delta_init = delta_init;
  b.epsilon = epsilon;
  b.precision_Z = precision_Z;
  b.seed = seed;
  b.force_find_alpha = force_find_alpha;
  return b;
}

Loss RunConfig::make_loss() const {
  if (!loss_table.empty()) return load_loss_table(loss_table);
  return secantboost::make_loss(loss, loss_params);
}

std::uint64_t default_seed() {
  const char* env = std::getenv("SECANTBOOST_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t seed = 0;
  const char* end = env + std::strlen(env);
  auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) throw ConfigError("SECANTBOOST_SEED is not an unsigned integer");
  return seed;
}

}  // namespace secantboost
