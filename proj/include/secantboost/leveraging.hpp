#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "secantboost/dataset.hpp"
#include "secantboost/ensemble.hpp"
#include "secantboost/loss.hpp"
#include "secantboost/weak_learner.hpp"

namespace secantboost {

/// Per-example quantities the leveraging step reads: previous edges
/// y_i H_prev(x_i), signed predictions y_i h(x_i) and previous offsets.
struct MarginView {
  std::span<const double> prev_edges;
  std::span<const double> signed_predictions;
  std::span<const double> offsets;

  std::size_t size() const { return prev_edges.size(); }
};

enum class LeveragingRoute { smoothness, findalpha };

struct LeveragingResult {
  double alpha = 0.0;
  double w2_bar = 0.0;
  double epsilon = 0.0;
  LeveragingRoute route = LeveragingRoute::smoothness;
  std::optional<double> pi;       ///< only when supplied on the smoothness route
  double w2_lhs = 0.0;            ///< |E[(h/M)^2 D_{e,v} F(e_prev)]| at the chosen alpha
  bool w2_fallback = false;       ///< W was found by halving because the LHS is machine zero
  std::size_t halvings = 0;
  double ratio = 0.0;             ///< |eta - eta(w~(alpha))| / |eta|
};

inline constexpr std::size_t kMaxAlphaHalvings = 200;

/// (1/m) sum_i w_i y_i h(x_i), with signed_predictions = y_i h(x_i).
double edge(std::span<const double> w, std::span<const double> signed_predictions);
double edge(std::span<const double> w, const Dataset& S, const DecisionTree& h);

/// w~_i(alpha) = -D_{v_i} F(alpha y_i h(x_i) + y_i H_prev(x_i)).
std::vector<double> partial_weights(const Loss& f, const MarginView& view, double alpha);
std::vector<double> partial_weights(const Loss& f, const Dataset& S, const Ensemble& H_prev, const DecisionTree& h,
                                    std::span<const double> v_prev, double alpha);

struct AlphaSearch {
  double alpha = 0.0;
  double ratio = 0.0;
  std::size_t halvings = 0;
};

/// Halves a from delta_init until |eta - eta(w~(sign(eta) a))| / |eta| < 1.
/// Throws WeakLearningError when eta == 0 and DiscontinuityAtEdgeError after
/// kMaxAlphaHalvings halvings.
AlphaSearch find_alpha(const Loss& f, const MarginView& view, std::span<const double> w, double delta_init = 1.0);
double find_alpha(const Loss& f, const Dataset& S, const Ensemble& H_prev, std::span<const double> w,
                  const DecisionTree& h, std::span<const double> v_prev, double delta_init = 1.0);

struct W2Estimate {
  double value = 0.0;   ///< the returned W
  double lhs = 0.0;     ///< |E[(h/M)^2 D_{alpha y h, v} F(e_prev)]|
  bool fallback = false;
};

/// |E[(h_i/M)^2 D_{{alpha y_i h_i, v_i}} F(e_prev_i)]|. When that is machine
/// zero (below the rounding noise of the expansion), W is halved from 1
/// until |alpha| < |eta| / (W M^2).
W2Estimate w2_from_alpha(const Loss& f, const MarginView& view, double alpha, double eta, double M);
double w2_from_alpha(const Loss& f, const Dataset& S, const Ensemble& H_prev, const DecisionTree& h,
                     std::span<const double> v_prev, double alpha, double eta, double M);

/// b_sup / |alpha| - 1 with b_sup = |eta| / (w2_bar M^2).
double epsilon_from(double alpha, double w2_bar, double eta, double M);

/// W2 = 2 beta and alpha = eta / (2 (1 + epsilon) M^2 W2).
LeveragingResult alpha_from_smoothness(double eta, double beta, double M, double epsilon, double pi);

/// find_alpha followed by w2_from_alpha and epsilon_from. If rounding makes
/// epsilon non-positive, alpha keeps halving.
LeveragingResult leverage_find_alpha(const Loss& f, const MarginView& view, std::span<const double> w, double M,
                                     double delta_init = 1.0);

/// W2 and epsilon for an alpha fixed by the caller (used after nudging).
LeveragingResult leverage_at_alpha(const Loss& f, const MarginView& view, std::span<const double> w, double M,
                                   double alpha);

}  // namespace secantboost
