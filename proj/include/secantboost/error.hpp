#pragma once

#include <stdexcept>
#include <string>

namespace secantboost {

/// Invalid run configuration or out-of-range hyperparameter.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unreadable, malformed or schema-incompatible data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every probed chord of the loss is flat: no initial weights can be formed.
class ConstantLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Edges keep landing on a declared discontinuity of the loss.
class DiscontinuityCollisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The leveraging search never met its acceptance condition. Happens when the
/// loss jumps exactly at one of the current edges.
class DiscontinuityAtEdgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The weak hypothesis has zero edge on the current weights.
class WeakLearningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace secantboost
