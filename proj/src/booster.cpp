#include "secantboost/booster.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "secantboost/error.hpp"
#include "secantboost/offset_oracle.hpp"
#include "secantboost/quantum_calculus.hpp"
#include "secantboost/random.hpp"
#include "secantboost/weak_learner.hpp"

namespace secantboost {

namespace {

constexpr double kScanV0[] = {-1.0, -0.1, 0.1, 1.0};
constexpr double kScanH0[] = {0.0, 0.1, -0.1, 0.5, -0.5, 1.0, -1.0};

bool usable_offset(double v) { return std::isfinite(v) && std::fabs(v) >= kMinOffsetMagnitude; }

double stats_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double abs_sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return s;
}

// Signed LHS of the W2 condition at the chosen alpha.
double w2_condition_lhs(const Loss& f, const MarginView& view, double alpha, double M) {
  double sum = 0.0;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double e = alpha * view.signed_predictions[i];
    if (std::fabs(e) < kMinOffsetMagnitude) continue;
    const double r = view.signed_predictions[i] / M;
    sum += r * r * v_derivative(f, view.prev_edges[i], OffsetList{e, view.offsets[i]});
  }
  return sum / static_cast<double>(view.size());
}

}  // namespace

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::none: return "none";
    case StopReason::offsets_infeasible: return "offsets_infeasible";
    case StopReason::zero_weights: return "zero_weights";
    case StopReason::completed: return "completed";
  }
  return "none";
}

StopReason stop_reason_from_string(std::string_view s) {
  if (s == "none") return StopReason::none;
  if (s == "offsets_infeasible") return StopReason::offsets_infeasible;
  if (s == "zero_weights") return StopReason::zero_weights;
  if (s == "completed") return StopReason::completed;
  throw DataError("unknown stop reason '" + std::string(s) + "'");
}

std::string_view to_string(LeveragingRoute r) { return r == LeveragingRoute::smoothness ? "smoothness" : "findalpha"; }

Initialization initialize(const Loss& f, const Dataset& S, std::optional<double> h0_hint,
                          std::optional<double> v0_hint) {
  auto slope = [&](double h0, double v0) { return v_derivative(f, h0, v0); };
  std::vector<double> vs(std::begin(kScanV0), std::end(kScanV0));
  std::vector<double> hs(std::begin(kScanH0), std::end(kScanH0));
  if (v0_hint && usable_offset(*v0_hint)) vs = {*v0_hint};
  if (h0_hint && std::isfinite(*h0_hint)) hs = {*h0_hint};
  std::optional<std::pair<double, double>> pick;
  // Hinted values first, then the full grid.
  for (int pass = 0; pass < 2 && !pick; ++pass) {
    if (pass == 1) {
      vs.assign(std::begin(kScanV0), std::end(kScanV0));
      hs.assign(std::begin(kScanH0), std::end(kScanH0));
    }
    for (double v0 : vs) {
      for (double h0 : hs) {
        if (slope(h0, v0) != 0.0) {
          pick = {h0, v0};
          break;
        }
      }
      if (pick) break;
    }
  }
  if (!pick) throw ConstantLossError("loss '" + f.name() + "' is flat on every probed chord");

  Initialization out;
  out.ensemble.h0 = pick->first;
  out.v0 = pick->second;
  const std::size_t m = S.size();
  out.state.weights.assign(m, -slope(pick->first, pick->second));
  out.state.offsets.assign(m, pick->second);
  out.state.edges_tilde.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.state.edges_tilde[i] = S.label(i) * pick->first;
  out.F0 = empirical_loss(f, out.state.edges_tilde);
  return out;
}

double guaranteed_decrease_bound(double eta, double alpha, double epsilon, double M, double w2_bar) {
  if (eta == 0.0) return 0.0;
  const double a = alpha / eta;
  return std::max(0.0, a * eta * eta * (1.0 - a * (1.0 + epsilon) * M * M * w2_bar));
}

double guaranteed_decrease_bound(const BoostIterState& state, double alpha) {
  return guaranteed_decrease_bound(state.eta, alpha, state.epsilon, state.M, state.w2_bar);
}

bool convergence_certificate(std::span<const TelemetryRow> telemetry, double F0, double target) {
  double sum = 0.0;
  for (const TelemetryRow& r : telemetry) {
    if (!r.leveraged || !(r.w2_bar > 0.0)) continue;
    const double pi = std::clamp(r.pi, 0.0, 1.0);
    sum += r.w1_bar * r.w1_bar * (1.0 - pi * pi) * r.eta_tilde * r.eta_tilde / (r.w2_bar * (1.0 + r.epsilon));
  }
  return sum >= 4.0 * (F0 - target);
}

double nudge_alpha(const Loss& f, double alpha, std::span<const double> prev_edges,
                   std::span<const double> signed_predictions, double rel, std::uint64_t seed) {
  if (f.discontinuities().empty()) return alpha;
  if (!(rel > 0.0 && rel < 1.0)) throw ConfigError("nudge rel must lie in (0, 1)");
  auto collides = [&](double a) {
    for (std::size_t i = 0; i < prev_edges.size(); ++i) {
      const double e = prev_edges[i] + a * signed_predictions[i];
      for (const Jump& j : f.discontinuities())
        if (std::fabs(e - j.at) <= 1e-12) return true;
    }
    return false;
  };
  if (!collides(alpha)) return alpha;
  Rng rng(derive_seed(seed, {0x6e75646765ULL}));
  for (int attempt = 0; attempt < 50; ++attempt) {
    const double candidate = alpha * (1.0 + rel * (2.0 * rng.uniform() - 1.0));
    if (candidate != alpha && !collides(candidate)) return candidate;
  }
  throw DiscontinuityCollisionError("edges keep landing on a discontinuity of '" + f.name() + "'");
}

double nudge_alpha(const Loss& f, double alpha, const Dataset& S, const Ensemble& H_prev, const DecisionTree& h,
                   double rel, std::uint64_t seed) {
  const auto prev = margins(S, H_prev.predict_all(S));
  const auto yh = margins(S, h.predict_all(S));
  return nudge_alpha(f, alpha, prev, yh, rel, seed);
}

BoostResult run(const Loss& f, const Dataset& S, const BoostConfig& cfg, const IterationObserver& observer) {
  if (cfg.T < 1) throw ConfigError("T must be at least 1");
  if (cfg.max_nodes < 1) throw ConfigError("max_nodes must be at least 1");
  if (cfg.precision_Z < 2) throw ConfigError("precision_Z must be at least 2");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(cfg.delta_init > 0.0)) throw ConfigError("delta_init must be positive");

  BoostResult result;
  const std::size_t m = S.size();
  Initialization init;
  try {
    init = initialize(f, S, cfg.h0, cfg.v0);
  } catch (const ConstantLossError&) {
    result.constant_loss = true;
    result.stop_reason = StopReason::zero_weights;
    std::vector<double> zero(m, 0.0);
    TelemetryRow row;
    row.t = 1;
    row.train_loss = empirical_loss(f, zero);
    row.prev_loss = row.train_loss;
    row.train_err = zero_one_error(zero);
    row.stop_reason = StopReason::zero_weights;
    result.F0 = row.train_loss;
    result.telemetry.push_back(row);
    result.final_state.weights = zero;
    result.final_state.edges_tilde = zero;
    result.final_state.stop_reason = StopReason::zero_weights;
    result.warnings.push_back("constant loss: every probed chord is flat");
    return result;
  }

  result.ensemble = init.ensemble;
  result.F0 = init.F0;
  result.v0 = init.v0;
  BoostIterState st = std::move(init.state);
  result.min_abs_eta_tilde = std::numeric_limits<double>::infinity();
  result.min_rho = std::numeric_limits<double>::infinity();
  double prev_loss = init.F0;

  std::vector<int> signed_labels(m);
  std::vector<double> abs_w(m), new_edges(m), new_offsets(m), next_w(m);
  std::vector<char> from_oracle(m);

  for (std::size_t t = 1; t <= cfg.T; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      signed_labels[i] = st.weights[i] >= 0.0 ? S.label(i) : -S.label(i);
      abs_w[i] = std::fabs(st.weights[i]);
    }
    st.weight_mass = abs_sum(st.weights);
    st.w1_bar = std::fabs(stats_mean(st.weights));

    DecisionTree h = train_tree(S, signed_labels, abs_w, cfg.max_nodes);
    {
      const double M_raw = max_confidence(h, S);
      double gamma = 1e-3;
      if (M_raw > 0.0) {
        const double eta_raw = edge(st.weights, margins(S, h.predict_all(S)));
        gamma = std::max(gamma, std::fabs(static_cast<double>(m) * eta_raw / (st.weight_mass * M_raw)));
      }
      h = nonzero_shift(h, S, gamma, cfg.shift_eps_frac);
    }
    const std::vector<double> yh = margins(S, h.predict_all(S));
    st.M = max_confidence(h, S);
    st.eta = edge(st.weights, yh);
    st.eta_tilde = static_cast<double>(m) * st.eta / (st.weight_mass * st.M);

    TelemetryRow row;
    row.t = t;
    row.eta = st.eta;
    row.eta_tilde = st.eta_tilde;
    row.w1_bar = st.w1_bar;
    row.M = st.M;
    row.weight_mass = st.weight_mass;
    row.prev_loss = prev_loss;

    if (st.eta == 0.0) {
      row.train_loss = prev_loss;
      row.train_err = zero_one_error(st.edges_tilde);
      row.stop_reason = StopReason::none;
      result.telemetry.push_back(row);
      result.stop_reason = StopReason::none;
      result.warnings.push_back("iteration " + std::to_string(t) + ": weak hypothesis has zero edge, stopping");
      break;
    }

    const MarginView view{st.edges_tilde, yh, st.offsets};
    LeveragingResult lev;
    const auto beta = f.smoothness_beta();
    const bool smooth = beta && *beta > 0.0 && !cfg.force_find_alpha;
    if (smooth) {
      lev = alpha_from_smoothness(st.eta, *beta, st.M, cfg.epsilon, cfg.pi);
    } else {
      try {
        lev = leverage_find_alpha(f, view, st.weights, st.M, cfg.delta_init);
      } catch (const DiscontinuityAtEdgeError& e) {
        throw DiscontinuityCollisionError(std::string("iteration ") + std::to_string(t) + ": " + e.what());
      }
    }
    if (!f.discontinuities().empty()) {
      const double nudged = nudge_alpha(f, lev.alpha, st.edges_tilde, yh, cfg.nudge_rel, derive_seed(cfg.seed, {t}));
      if (nudged != lev.alpha) {
        if (smooth) {
          lev.alpha = nudged;
        } else {
          const std::size_t halvings = lev.halvings;
          lev = leverage_at_alpha(f, view, st.weights, st.M, nudged);
          lev.halvings = halvings;
        }
      }
    }
    st.w2_bar = lev.w2_bar;
    st.epsilon = lev.epsilon;
    st.rho = st.w1_bar * st.w1_bar / st.w2_bar;

    row.alpha = lev.alpha;
    row.epsilon = lev.epsilon;
    row.w2_bar = lev.w2_bar;
    row.rho = st.rho;
    row.route = lev.route;
    row.leveraged = true;
    row.w2_fallback = lev.w2_fallback;
    row.w2_lhs = w2_condition_lhs(f, view, lev.alpha, st.M);
    row.bound = guaranteed_decrease_bound(st, lev.alpha);
    {
      const double a = lev.alpha / st.eta;
      row.pi = std::min(1.0, std::fabs(2.0 * a * (1.0 + lev.epsilon) * st.M * st.M * lev.w2_bar - 1.0));
    }
    result.min_abs_eta_tilde = std::min(result.min_abs_eta_tilde, std::fabs(st.eta_tilde));
    result.min_rho = std::min(result.min_rho, st.rho);

    result.ensemble.terms.push_back({lev.alpha, h});
    for (std::size_t i = 0; i < m; ++i) new_edges[i] = st.edges_tilde[i] + lev.alpha * yh[i];

    const double z_limit = lev.epsilon * lev.alpha * lev.alpha * st.M * st.M * lev.w2_bar;
    row.z_limit = z_limit;
    bool infeasible = !(z_limit > 0.0);
    for (std::size_t i = 0; i < m && !infeasible; ++i) {
      if (new_edges[i] == st.edges_tilde[i]) {
        new_offsets[i] = sanitize_offset(st.offsets[i], cfg.sanitize_scale, derive_seed(cfg.seed, {t, i}));
        from_oracle[i] = 0;
        continue;
      }
      OffsetRequest req{new_edges[i], st.edges_tilde[i], z_limit, cfg.precision_Z, cfg.max_retries, cfg.grid_points};
      const auto v = find_offset(f, req);
      if (!v) {
        infeasible = true;
        break;
      }
      new_offsets[i] = sanitize_offset(*v, cfg.sanitize_scale, derive_seed(cfg.seed, {t, i}));
      from_oracle[i] = 1;
    }

    row.train_loss = empirical_loss(f, new_edges);
    row.train_err = zero_one_error(new_edges);
    prev_loss = row.train_loss;

    if (infeasible) {
      row.stop_reason = StopReason::offsets_infeasible;
      result.telemetry.push_back(row);
      result.stop_reason = StopReason::offsets_infeasible;
      if (observer) {
        IterationTrace tr{t, st.weights, yh, st.edges_tilde, new_edges, st.offsets, {}, {}, {}, &lev,
                          &result.telemetry.back(), z_limit};
        observer(tr);
      }
      st.edges_tilde = new_edges;
      break;
    }

    bool all_zero = true;
    for (std::size_t i = 0; i < m; ++i) {
      next_w[i] = -v_derivative(f, new_edges[i], new_offsets[i]);
      all_zero = all_zero && next_w[i] == 0.0;
    }
    row.stop_reason = all_zero ? StopReason::zero_weights : (t == cfg.T ? StopReason::completed : StopReason::none);
    result.telemetry.push_back(row);
    if (observer) {
      IterationTrace tr{t,         st.weights, yh,     st.edges_tilde, new_edges, st.offsets, new_offsets,
                        from_oracle, next_w,   &lev, &result.telemetry.back(), z_limit};
      observer(tr);
    }
    st.edges_tilde = new_edges;
    st.offsets = new_offsets;
    st.weights = next_w;
    st.stop_reason = row.stop_reason;
    result.stop_reason = row.stop_reason;
    if (all_zero) break;
  }
  if (!std::isfinite(result.min_abs_eta_tilde)) result.min_abs_eta_tilde = 0.0;
  if (!std::isfinite(result.min_rho)) result.min_rho = 0.0;
  result.final_state = std::move(st);
  return result;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string telemetry_csv(std::span<const TelemetryRow> rows) {
  std::string out(kTelemetryHeader);
  out += '\n';
  for (const TelemetryRow& r : rows) {
    out += std::to_string(r.t);
    for (double x : {r.train_loss, r.train_err, r.eta, r.eta_tilde, r.alpha, r.epsilon, r.w1_bar, r.w2_bar, r.rho,
                     r.M, r.weight_mass}) {
      out += ',';
      out += format_double(x);
    }
    out += ',';
    out += to_string(r.stop_reason);
    out += '\n';
  }
  return out;
}

void write_telemetry_csv(std::span<const TelemetryRow> rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << telemetry_csv(rows);
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace secantboost
