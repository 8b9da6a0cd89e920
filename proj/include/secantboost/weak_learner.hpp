#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "secantboost/dataset.hpp"

namespace secantboost {

/// Internal nodes test `numeric feature <= threshold` or `categorical
/// feature == level`; true goes left. Leaves have feature == -1.
struct TreeNode {
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
  std::string level;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
};

/// A real-valued decision tree. nodes[0] is the root.
class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::vector<FeatureSchema> schema);

  /// Single-leaf tree predicting `value` everywhere.
  static DecisionTree constant(double value, std::vector<FeatureSchema> schema = {});

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<FeatureSchema>& schema() const { return schema_; }
  std::size_t internal_count() const;
  std::size_t leaf_count() const { return nodes_.size() - internal_count(); }

  /// Throws DataError unless S has the same feature names and kinds.
  void check_schema(const Dataset& S) const;

  double predict(const Dataset& S, std::size_t i) const;
  std::vector<double> predict_all(const Dataset& S) const;

  /// Index into nodes() of the leaf reached by example i.
  std::size_t leaf_index(const Dataset& S, std::size_t i) const;

  /// Copy with `delta` added to every leaf value.
  DecisionTree shifted(double delta) const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<FeatureSchema> schema_;
};

using WeakHypothesis = DecisionTree;

std::vector<FeatureSchema> schema_of(const Dataset& S);

/// Greedy best-first induction minimising the weighted Matushita impurity
/// sum over leaves of 2 sqrt(W+ W-), with up to `max_nodes` internal nodes
/// (1 gives a stump). Examples with zero weight are ignored for splitting.
/// Leaves predict (1/2) log((p + k) / (1 - p + k)), p the weighted positive
/// fraction and k = 1 / (2n + 2) for the n weighted examples in the leaf.
/// Ties go to the lowest feature index, then the lowest threshold (level
/// code for categorical features), then the earliest leaf.
DecisionTree train_tree(const Dataset& S, std::span<const int> labels, std::span<const double> weights,
                        std::size_t max_nodes);

/// Same, using the labels stored in S.
DecisionTree train_tree(const Dataset& S, std::span<const double> weights, std::size_t max_nodes);

/// max_i |h(x_i)| over S.
double max_confidence(const DecisionTree& h, const Dataset& S);

/// If h predicts 0 on some example of S (or has a zero leaf), adds
/// delta = eps_frac * gamma_est * M / (1 + gamma_est) to every leaf, with the
/// sign that creates no new zero leaf (delta halves if both signs would).
/// Otherwise returns h unchanged.
DecisionTree nonzero_shift(const DecisionTree& h, const Dataset& S, double gamma_est, double eps_frac);

}  // namespace secantboost
