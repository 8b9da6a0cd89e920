#include "secantboost/leveraging.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "secantboost/error.hpp"
#include "secantboost/quantum_calculus.hpp"

namespace secantboost {

namespace {

void check_view(const MarginView& view, std::span<const double> w) {
  if (view.signed_predictions.size() != view.size() || view.offsets.size() != view.size() ||
      (!w.empty() && w.size() != view.size()))
    throw std::invalid_argument("per-example vectors have mismatched lengths");
}

double sign_of(double x) { return x > 0.0 ? 1.0 : -1.0; }

struct ViewStorage {
  std::vector<double> prev_edges, signed_predictions, offsets;
  MarginView view() const { return {prev_edges, signed_predictions, offsets}; }
};

ViewStorage make_view(const Dataset& S, const Ensemble& H_prev, const DecisionTree& h, std::span<const double> v_prev) {
  if (v_prev.size() != S.size()) throw std::invalid_argument("one offset per example required");
  ViewStorage st;
  st.prev_edges = margins(S, H_prev.predict_all(S));
  st.signed_predictions = margins(S, h.predict_all(S));
  st.offsets.assign(v_prev.begin(), v_prev.end());
  return st;
}

}  // namespace

double edge(std::span<const double> w, std::span<const double> signed_predictions) {
  if (w.size() != signed_predictions.size()) throw std::invalid_argument("weights and predictions differ in length");
  if (w.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * signed_predictions[i];
  return sum / static_cast<double>(w.size());
}

double edge(std::span<const double> w, const Dataset& S, const DecisionTree& h) {
  return edge(w, margins(S, h.predict_all(S)));
}

std::vector<double> partial_weights(const Loss& f, const MarginView& view, double alpha) {
  check_view(view, {});
  std::vector<double> out(view.size());
  for (std::size_t i = 0; i < view.size(); ++i)
    out[i] = -v_derivative(f, view.prev_edges[i] + alpha * view.signed_predictions[i], view.offsets[i]);
  return out;
}

std::vector<double> partial_weights(const Loss& f, const Dataset& S, const Ensemble& H_prev, const DecisionTree& h,
                                    std::span<const double> v_prev, double alpha) {
  const ViewStorage st = make_view(S, H_prev, h, v_prev);
  return partial_weights(f, st.view(), alpha);
}

namespace {

double ratio_at(const Loss& f, const MarginView& view, double eta, double alpha) {
  const std::vector<double> wt = partial_weights(f, view, alpha);
  return std::fabs(eta - edge(wt, view.signed_predictions)) / std::fabs(eta);
}

}  // namespace

AlphaSearch find_alpha(const Loss& f, const MarginView& view, std::span<const double> w, double delta_init) {
  check_view(view, w);
  if (!(delta_init > 0.0) || !std::isfinite(delta_init)) throw ConfigError("delta_init must be a positive real");
  const double eta = edge(w, view.signed_predictions);
  if (eta == 0.0) throw WeakLearningError("weak hypothesis has zero edge");
  double delta = delta_init;
  for (std::size_t k = 0; k <= kMaxAlphaHalvings; ++k, delta /= 2.0) {
    const double alpha = sign_of(eta) * delta;
    const double r = ratio_at(f, view, eta, alpha);
    if (r < 1.0) return {alpha, r, k};
  }
  throw DiscontinuityAtEdgeError("no leveraging coefficient found after 200 halvings");
}

double find_alpha(const Loss& f, const Dataset& S, const Ensemble& H_prev, std::span<const double> w,
                  const DecisionTree& h, std::span<const double> v_prev, double delta_init) {
  const ViewStorage st = make_view(S, H_prev, h, v_prev);
  return find_alpha(f, st.view(), w, delta_init).alpha;
}

W2Estimate w2_from_alpha(const Loss& f, const MarginView& view, double alpha, double eta, double M) {
  check_view(view, {});
  if (alpha == 0.0) throw std::invalid_argument("alpha must be nonzero");
  if (!(M > 0.0)) throw std::invalid_argument("M must be positive");
  double sum = 0.0;
  double noise = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double a = view.prev_edges[i];
    const double b = alpha * view.signed_predictions[i];
    const double c = view.offsets[i];
    // An update that underflows moves nothing and has no second secant.
    if (std::fabs(b) < kMinOffsetMagnitude) continue;
    require_offset(c);
    const double f_bc = f(a + b + c), f_b = f(a + b), f_c = f(a + c), f_a = f(a);
    const double scale = (view.signed_predictions[i] / M) * (view.signed_predictions[i] / M) / std::fabs(b * c);
    sum += scale * (f_bc - f_b - f_c + f_a);
    noise += scale * (std::fabs(f_bc) + std::fabs(f_b) + std::fabs(f_c) + std::fabs(f_a));
  }
  const double m = static_cast<double>(view.size());
  W2Estimate out;
  out.lhs = std::fabs(sum / m);
  if (out.lhs > 8.0 * std::numeric_limits<double>::epsilon() * noise / m) {
    out.value = out.lhs;
    return out;
  }
  out.fallback = true;
  double W = 1.0;
  // Strict, so that the resulting epsilon is positive.
  while (std::fabs(alpha) >= std::fabs(eta) / (W * M * M)) W /= 2.0;
  out.value = W;
  return out;
}

double w2_from_alpha(const Loss& f, const Dataset& S, const Ensemble& H_prev, const DecisionTree& h,
                     std::span<const double> v_prev, double alpha, double eta, double M) {
  const ViewStorage st = make_view(S, H_prev, h, v_prev);
  return w2_from_alpha(f, st.view(), alpha, eta, M).value;
}

double epsilon_from(double alpha, double w2_bar, double eta, double M) {
  if (!(w2_bar > 0.0) || !(M > 0.0)) throw std::invalid_argument("W2 and M must be positive");
  const double b_sup = std::fabs(eta) / (w2_bar * M * M);
  if (alpha == 0.0 || !(std::fabs(alpha) < b_sup))
    throw std::invalid_argument("alpha must satisfy 0 < |alpha| < |eta| / (W2 M^2)");
  return b_sup / std::fabs(alpha) - 1.0;
}

LeveragingResult alpha_from_smoothness(double eta, double beta, double M, double epsilon, double pi) {
  if (eta == 0.0) throw WeakLearningError("weak hypothesis has zero edge");
  if (!(beta > 0.0) || !(M > 0.0)) throw std::invalid_argument("beta and M must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(pi > 0.0 && pi < 1.0)) throw ConfigError("pi must lie in (0, 1)");
  LeveragingResult r;
  r.route = LeveragingRoute::smoothness;
  r.w2_bar = 2.0 * beta;
  r.epsilon = epsilon;
  r.pi = pi;
  r.alpha = eta / (2.0 * (1.0 + epsilon) * M * M * r.w2_bar);
  return r;
}

LeveragingResult leverage_at_alpha(const Loss& f, const MarginView& view, std::span<const double> w, double M,
                                   double alpha) {
  const double eta = edge(w, view.signed_predictions);
  LeveragingResult r;
  r.route = LeveragingRoute::findalpha;
  r.alpha = alpha;
  r.ratio = ratio_at(f, view, eta, alpha);
  const W2Estimate est = w2_from_alpha(f, view, alpha, eta, M);
  r.w2_bar = est.value;
  r.w2_lhs = est.lhs;
  r.w2_fallback = est.fallback;
  const double b_sup = std::fabs(eta) / (r.w2_bar * M * M);
  r.epsilon = b_sup / std::fabs(alpha) - 1.0;
  return r;
}

LeveragingResult leverage_find_alpha(const Loss& f, const MarginView& view, std::span<const double> w, double M,
                                     double delta_init) {
  AlphaSearch search = find_alpha(f, view, w, delta_init);
  double alpha = search.alpha;
  for (std::size_t k = search.halvings; k <= kMaxAlphaHalvings; ++k, alpha /= 2.0) {
    LeveragingResult r = leverage_at_alpha(f, view, w, M, alpha);
    r.halvings = k;
    if (r.ratio < 1.0 && r.epsilon > 0.0) return r;
  }
  throw DiscontinuityAtEdgeError("no leveraging coefficient with positive epsilon after 200 halvings");
}

}  // namespace secantboost
