#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "secantboost/dataset.hpp"
#include "secantboost/error.hpp"
#include "secantboost/leveraging.hpp"
#include "secantboost/random.hpp"
#include "secantboost/weak_learner.hpp"
#include "support/check.hpp"
#include "support/fixtures.hpp"

using namespace secantboost;
using secantboost::testing::close;

namespace {

double impurity(double wp, double wn) { return 2.0 * std::sqrt(wp * wn); }

/// Smallest children impurity over every axis split of S, by enumeration.
double brute_force_root(const Dataset& S, std::span<const int> y, std::span<const double> w) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < S.num_features(); ++j) {
    const FeatureColumn& col = S.column(j);
    std::vector<std::function<bool(std::size_t)>> tests;
    if (col.kind == FeatureKind::numeric) {
      std::set<double> values(col.numeric.begin(), col.numeric.end());
      for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
        const double t = 0.5 * (*it + *std::next(it));
        tests.push_back([&col, t](std::size_t i) { return col.numeric[i] <= t; });
      }
    } else {
      for (int c = 0; c < static_cast<int>(col.levels.size()); ++c)
        tests.push_back([&col, c](std::size_t i) { return col.codes[i] == c; });
    }
    for (const auto& test : tests) {
      double lp = 0, ln = 0, rp = 0, rn = 0;
      std::size_t nl = 0;
      for (std::size_t i = 0; i < S.size(); ++i) {
        const bool left = test(i);
        nl += left;
        (left ? (y[i] > 0 ? lp : ln) : (y[i] > 0 ? rp : rn)) += w[i];
      }
      if (nl == 0 || nl == S.size()) continue;
      best = std::min(best, impurity(lp, ln) + impurity(rp, rn));
    }
  }
  return best;
}

double children_impurity(const DecisionTree& h, const Dataset& S, std::span<const int> y, std::span<const double> w) {
  const auto& nodes = h.nodes();
  double lp = 0, ln = 0, rp = 0, rn = 0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const bool left = h.leaf_index(S, i) == static_cast<std::size_t>(nodes[0].left);
    (left ? (y[i] > 0 ? lp : ln) : (y[i] > 0 ? rp : rn)) += w[i];
  }
  return impurity(lp, ln) + impurity(rp, rn);
}

}  // namespace

TEST_CASE("a stump has one split and two leaves") {
  const Dataset S = testing::noisy_3d(60, 1);
  const DecisionTree h = train_tree(S, std::vector<double>(60, 1.0), 1);
  CHECK(h.internal_count() == 1);
  CHECK(h.leaf_count() == 2);
}

TEST_CASE("max_nodes bounds the internal node count") {
  const Dataset S = testing::noisy_3d(200, 2);
  for (std::size_t n : {2u, 5u, 20u}) {
    const DecisionTree h = train_tree(S, std::vector<double>(200, 1.0), n);
    CHECK(h.internal_count() <= n);
    CHECK(h.leaf_count() == h.internal_count() + 1);
  }
  CHECK_THROWS_AS(train_tree(S, std::vector<double>(200, 1.0), 0), ConfigError);
}

TEST_CASE("pure data gives a single leaf of the right sign") {
  const Dataset S = Dataset::from_numeric({{0.0}, {1.0}, {2.0}}, {-1, -1, -1});
  const DecisionTree h = train_tree(S, std::vector<double>{1.0, 2.0, 0.5}, 5);
  CHECK(h.nodes().size() == 1);
  CHECK(h.predict(S, 0) < 0.0);
  // kappa = 1/8 with three weighted examples
  CHECK(close(h.predict(S, 0), 0.5 * std::log((0.0 + 0.125) / (1.0 + 0.125))));
}

TEST_CASE("XOR-shaped categorical data is fit by three nodes") {
  const Dataset S = Dataset::from_categorical({{"u", "u"}, {"u", "v"}, {"v", "u"}, {"v", "v"}}, {-1, 1, 1, -1});
  const std::vector<double> w(4, 1.0);
  const DecisionTree h = train_tree(S, w, 3);
  CHECK(children_impurity(h, S, S.labels(), w) == doctest::Approx(brute_force_root(S, S.labels(), w)));
  const double eta = edge(w, S, h);
  CHECK(eta > 0.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(h.predict(S, i) * S.label(i) > 0.0);
}

TEST_CASE("root split is optimal against enumeration") {
  Rng rng(61);
  for (int k = 0; k < 30; ++k) {
    const std::size_t m = 25;
    std::vector<FeatureColumn> cols(3);
    cols[0] = {"a", FeatureKind::numeric};
    cols[1] = {"b", FeatureKind::numeric};
    cols[2] = {"c", FeatureKind::categorical};
    cols[2].levels = {"p", "q", "r"};
    std::vector<int> y(m);
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
      cols[0].numeric.push_back(std::round(rng.uniform(0, 10)));
      cols[1].numeric.push_back(rng.uniform(-1, 1));
      cols[2].codes.push_back(static_cast<int>(rng.below(3)));
      y[i] = rng.bernoulli(0.5) ? 1 : -1;
      w[i] = rng.uniform(0.1, 2);
    }
    y[0] = 1;
    y[1] = -1;
    const Dataset S(std::move(cols), y);
    const DecisionTree h = train_tree(S, w, 1);
    REQUIRE(h.internal_count() == 1);
    CHECK(children_impurity(h, S, y, w) <= brute_force_root(S, y, w) + 1e-12);
  }
}

TEST_CASE("signed labels and absolute weights drive the split") {
  // negative weights are folded into the labels by the caller
  const Dataset S = Dataset::from_numeric({{0.0}, {1.0}, {2.0}, {3.0}}, {1, 1, 1, 1});
  const std::vector<int> ytilde{1, 1, -1, -1};
  const DecisionTree h = train_tree(S, ytilde, std::vector<double>(4, 1.0), 1);
  CHECK(h.nodes()[0].threshold == 1.5);
  CHECK(h.predict(S, 0) > 0.0);
  CHECK(h.predict(S, 3) < 0.0);
  CHECK_THROWS_AS(train_tree(S, ytilde, std::vector<double>{1.0, -1.0, 1.0, 1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(train_tree(S, ytilde, std::vector<double>(4, 0.0), 1), std::invalid_argument);
}

TEST_CASE("zero-weight examples are ignored for splitting") {
  const Dataset S = Dataset::from_numeric({{0.0}, {1.0}, {2.0}}, {1, -1, 1});
  const DecisionTree h = train_tree(S, std::vector<double>{1.0, 0.0, 1.0}, 3);
  CHECK(h.nodes().size() == 1);
}

TEST_CASE("predict on hand-built trees") {
  const Dataset S = Dataset::from_numeric({{-1.0}, {0.5}, {3.0}}, {1, 1, -1});
  const DecisionTree c = DecisionTree::constant(-0.4, schema_of(S));
  for (std::size_t i = 0; i < 3; ++i) CHECK(c.predict(S, i) == -0.4);
  CHECK(max_confidence(c, S) == 0.4);

  const DecisionTree stump({TreeNode{.feature = 0, .threshold = 0.5, .left = 1, .right = 2}, TreeNode{.value = 0.5},
                            TreeNode{.value = -2.0}},
                           schema_of(S));
  CHECK(stump.predict(S, 0) == 0.5);
  CHECK(stump.predict(S, 1) == 0.5);
  CHECK(stump.predict(S, 2) == -2.0);
  CHECK(max_confidence(stump, S) == 2.0);
  CHECK_THROWS_AS(DecisionTree({TreeNode{.feature = 0, .left = 5, .right = 6}}, schema_of(S)), DataError);
}

TEST_CASE("categorical trees test level equality") {
  const Dataset S = Dataset::from_categorical({{"x"}, {"o"}, {"b"}}, {1, -1, -1});
  const DecisionTree h({TreeNode{.feature = 0, .categorical = true, .level = "o", .left = 1, .right = 2},
                        TreeNode{.value = 1.0}, TreeNode{.value = 3.0}},
                       schema_of(S));
  CHECK(h.predict(S, 0) == 3.0);
  CHECK(h.predict(S, 1) == 1.0);
  const Dataset other = Dataset::from_numeric({{1.0}}, {1});
  CHECK_THROWS_AS(h.check_schema(other), DataError);
}

TEST_CASE("trained trees respect the confidence bound and never predict zero") {
  const Dataset S = testing::tictactoe();
  Rng rng(62);
  std::vector<double> w(S.size());
  for (double& x : w) x = rng.uniform(0.01, 1);
  const DecisionTree h = train_tree(S, w, 20);
  const double M = max_confidence(h, S);
  for (std::size_t i = 0; i < S.size(); ++i) {
    CHECK(std::fabs(h.predict(S, i)) <= M);
    CHECK(h.predict(S, i) != 0.0);
  }
}

TEST_CASE("nonzero_shift") {
  const Dataset S = Dataset::from_numeric({{0.0}, {1.0}}, {1, -1});
  const DecisionTree ok({TreeNode{.feature = 0, .threshold = 0.5, .left = 1, .right = 2}, TreeNode{.value = 0.3},
                         TreeNode{.value = -0.2}},
                        schema_of(S));
  const DecisionTree same = nonzero_shift(ok, S, 0.1, 0.5);
  CHECK(same.predict(S, 0) == 0.3);
  CHECK(same.predict(S, 1) == -0.2);

  const DecisionTree zero({TreeNode{.feature = 0, .threshold = 0.5, .left = 1, .right = 2}, TreeNode{.value = 0.0},
                           TreeNode{.value = 1.0}},
                          schema_of(S));
  const DecisionTree shifted = nonzero_shift(zero, S, 0.1, 0.5);
  const double delta = 0.5 * 0.1 * 1.0 / 1.1;
  CHECK(close(shifted.predict(S, 0), delta));
  CHECK(close(shifted.predict(S, 1), 1.0 + delta));
  CHECK(close(max_confidence(shifted, S), 1.0 + delta));

  // +delta would zero the other leaf, so the shift goes the other way
  const DecisionTree tricky({TreeNode{.feature = 0, .threshold = 0.5, .left = 1, .right = 2},
                             TreeNode{.value = 0.0}, TreeNode{.value = -delta}},
                            schema_of(S));
  const DecisionTree t2 = nonzero_shift(tricky, S, 0.1, 0.5);
  for (std::size_t i = 0; i < 2; ++i) CHECK(t2.predict(S, i) != 0.0);

  const DecisionTree all_zero = DecisionTree::constant(0.0, schema_of(S));
  const DecisionTree t3 = nonzero_shift(all_zero, S, 0.2, 0.5);
  CHECK(close(std::fabs(t3.predict(S, 0)), 0.5 * 0.2 / 1.2));
}
