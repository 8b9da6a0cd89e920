#include "secantboost/weak_learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "secantboost/error.hpp"

namespace secantboost {

namespace {

double matushita(double wp, double wn) { return 2.0 * std::sqrt(std::max(0.0, wp) * std::max(0.0, wn)); }

struct Split {
  bool valid = false;
  double impurity = std::numeric_limits<double>::infinity();
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
  int code = -1;
};

// `a` strictly preferred over `b`.
bool better(const Split& a, const Split& b) {
  if (!b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.impurity != b.impurity) return a.impurity < b.impurity;
  if (a.feature != b.feature) return a.feature < b.feature;
  return a.categorical ? a.code < b.code : a.threshold < b.threshold;
}

struct Leaf {
  std::size_t node = 0;
  std::vector<std::size_t> members;  // examples with positive weight
  double wp = 0.0;
  double wn = 0.0;
  Split best;
};

double leaf_value(double wp, double wn, std::size_t n) {
  const double total = wp + wn;
  const double p = total > 0.0 ? wp / total : 0.5;
  const double kappa = 1.0 / (2.0 * static_cast<double>(n) + 2.0);
  return 0.5 * std::log((p + kappa) / (1.0 - p + kappa));
}

Split best_split(const Dataset& S, std::span<const int> y, std::span<const double> w, const Leaf& leaf) {
  Split best;
  if (leaf.wp <= 0.0 || leaf.wn <= 0.0) return best;
  std::vector<std::size_t> order = leaf.members;
  for (std::size_t j = 0; j < S.num_features(); ++j) {
    const FeatureColumn& col = S.column(j);
    if (col.kind == FeatureKind::numeric) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return col.numeric[a] < col.numeric[b] || (col.numeric[a] == col.numeric[b] && a < b);
      });
      double lp = 0.0, ln = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const std::size_t i = order[k];
        (y[i] > 0 ? lp : ln) += w[i];
        const double x0 = col.numeric[i];
        const double x1 = col.numeric[order[k + 1]];
        if (x0 == x1) continue;
        Split s{true, matushita(lp, ln) + matushita(leaf.wp - lp, leaf.wn - ln), static_cast<int>(j), false,
                x0 + (x1 - x0) / 2.0, -1};
        if (better(s, best)) best = s;
      }
    } else {
      std::vector<double> cp(col.levels.size(), 0.0), cn(col.levels.size(), 0.0);
      std::vector<std::size_t> count(col.levels.size(), 0);
      for (std::size_t i : leaf.members) {
        const auto c = static_cast<std::size_t>(col.codes[i]);
        (y[i] > 0 ? cp : cn)[c] += w[i];
        ++count[c];
      }
      for (std::size_t c = 0; c < col.levels.size(); ++c) {
        if (count[c] == 0 || count[c] == leaf.members.size()) continue;
        Split s{true, matushita(cp[c], cn[c]) + matushita(leaf.wp - cp[c], leaf.wn - cn[c]), static_cast<int>(j),
                true, 0.0, static_cast<int>(c)};
        if (better(s, best)) best = s;
      }
    }
  }
  return best;
}

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::vector<FeatureSchema> schema)
    : nodes_(std::move(nodes)), schema_(std::move(schema)) {
  if (nodes_.empty()) throw DataError("tree has no nodes");
  for (const TreeNode& n : nodes_) {
    if (n.is_leaf()) continue;
    const auto size = static_cast<int>(nodes_.size());
    if (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size)
      throw DataError("tree node has invalid children");
    if (static_cast<std::size_t>(n.feature) >= schema_.size()) throw DataError("tree node tests an unknown feature");
  }
}

DecisionTree DecisionTree::constant(double value, std::vector<FeatureSchema> schema) {
  TreeNode leaf;
  leaf.value = value;
  return DecisionTree({leaf}, std::move(schema));
}

std::size_t DecisionTree::internal_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

void DecisionTree::check_schema(const Dataset& S) const {
  if (schema_.empty() && internal_count() == 0) return;
  if (S.num_features() != schema_.size())
    throw DataError("dataset has " + std::to_string(S.num_features()) + " features, model expects " +
                    std::to_string(schema_.size()));
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    if (S.column(j).name != schema_[j].name || S.column(j).kind != schema_[j].kind)
      throw DataError("feature " + std::to_string(j) + " ('" + S.column(j).name + "') does not match the model");
  }
}

std::size_t DecisionTree::leaf_index(const Dataset& S, std::size_t i) const {
  std::size_t k = 0;
  while (!nodes_[k].is_leaf()) {
    const TreeNode& n = nodes_[k];
    const FeatureColumn& col = S.column(static_cast<std::size_t>(n.feature));
    const bool go_left = n.categorical ? col.level(i) == n.level : col.numeric[i] <= n.threshold;
    k = static_cast<std::size_t>(go_left ? n.left : n.right);
  }
  return k;
}

double DecisionTree::predict(const Dataset& S, std::size_t i) const { return nodes_[leaf_index(S, i)].value; }

std::vector<double> DecisionTree::predict_all(const Dataset& S) const {
  check_schema(S);
  std::vector<double> out(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) out[i] = predict(S, i);
  return out;
}

DecisionTree DecisionTree::shifted(double delta) const {
  DecisionTree out = *this;
  for (TreeNode& n : out.nodes_)
    if (n.is_leaf()) n.value += delta;
  return out;
}

std::vector<FeatureSchema> schema_of(const Dataset& S) {
  std::vector<FeatureSchema> out;
  for (const FeatureColumn& c : S.columns()) out.push_back({c.name, c.kind});
  return out;
}

DecisionTree train_tree(const Dataset& S, std::span<const int> labels, std::span<const double> weights,
                        std::size_t max_nodes) {
  if (labels.size() != S.size() || weights.size() != S.size())
    throw std::invalid_argument("labels and weights must have one entry per example");
  if (max_nodes < 1) throw ConfigError("max_nodes must be at least 1");
  Leaf root;
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw std::invalid_argument("weights must be finite and >= 0");
    if (weights[i] > 0.0) {
      root.members.push_back(i);
      (labels[i] > 0 ? root.wp : root.wn) += weights[i];
    }
  }
  if (root.members.empty()) throw std::invalid_argument("all weights are zero");

  std::vector<TreeNode> nodes(1);
  std::vector<Leaf> leaves;
  root.best = best_split(S, labels, weights, root);
  leaves.push_back(std::move(root));

  std::size_t internal = 0;
  while (internal < max_nodes) {
    std::size_t pick = leaves.size();
    double best_gain = -1.0;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      if (!leaves[k].best.valid) continue;
      const double gain = matushita(leaves[k].wp, leaves[k].wn) - leaves[k].best.impurity;
      if (gain > best_gain) {
        best_gain = gain;
        pick = k;
      }
    }
    if (pick == leaves.size()) break;

    Leaf parent = std::move(leaves[pick]);
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pick));
    const Split& s = parent.best;
    const FeatureColumn& col = S.column(static_cast<std::size_t>(s.feature));
    Leaf left, right;
    left.node = nodes.size();
    right.node = nodes.size() + 1;
    for (std::size_t i : parent.members) {
      const bool go_left = s.categorical ? col.codes[i] == s.code : col.numeric[i] <= s.threshold;
      Leaf& dst = go_left ? left : right;
      dst.members.push_back(i);
      (labels[i] > 0 ? dst.wp : dst.wn) += weights[i];
    }
    TreeNode& n = nodes[parent.node];
    n.feature = s.feature;
    n.categorical = s.categorical;
    n.threshold = s.threshold;
    if (s.categorical) n.level = col.levels[static_cast<std::size_t>(s.code)];
    n.left = static_cast<int>(left.node);
    n.right = static_cast<int>(right.node);
    nodes.emplace_back();
    nodes.emplace_back();
    ++internal;
    left.best = best_split(S, labels, weights, left);
    right.best = best_split(S, labels, weights, right);
    // Keep leaves in creation order so ties go to the earliest one.
    leaves.push_back(std::move(left));
    leaves.push_back(std::move(right));
  }
  for (const Leaf& leaf : leaves) nodes[leaf.node].value = leaf_value(leaf.wp, leaf.wn, leaf.members.size());
  return DecisionTree(std::move(nodes), schema_of(S));
}

DecisionTree train_tree(const Dataset& S, std::span<const double> weights, std::size_t max_nodes) {
  return train_tree(S, S.labels(), weights, max_nodes);
}

double max_confidence(const DecisionTree& h, const Dataset& S) {
  double m = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) m = std::max(m, std::fabs(h.predict(S, i)));
  return m;
}

DecisionTree nonzero_shift(const DecisionTree& h, const Dataset& S, double gamma_est, double eps_frac) {
  if (!(gamma_est > 0.0)) throw std::invalid_argument("gamma_est must be positive");
  if (!(eps_frac > 0.0 && eps_frac < 1.0)) throw std::invalid_argument("eps_frac must lie in (0, 1)");
  bool zero = false;
  for (const TreeNode& n : h.nodes()) zero = zero || (n.is_leaf() && n.value == 0.0);
  for (std::size_t i = 0; i < S.size() && !zero; ++i) zero = h.predict(S, i) == 0.0;
  if (!zero) return h;

  double M = max_confidence(h, S);
  if (M == 0.0) M = 1.0;
  double delta = eps_frac * gamma_est * M / (1.0 + gamma_est);
  auto creates_zero = [&](double d) {
    for (const TreeNode& n : h.nodes())
      if (n.is_leaf() && n.value + d == 0.0) return true;
    return false;
  };
  for (int k = 0; k < 64; ++k, delta /= 2.0) {
    if (!creates_zero(delta)) return h.shifted(delta);
    if (!creates_zero(-delta)) return h.shifted(-delta);
  }
  throw std::runtime_error("could not shift tree off zero");
}

}  // namespace secantboost
