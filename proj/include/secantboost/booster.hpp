#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secantboost/dataset.hpp"
#include "secantboost/ensemble.hpp"
#include "secantboost/leveraging.hpp"
#include "secantboost/loss.hpp"

namespace secantboost {

enum class StopReason { none, offsets_infeasible, zero_weights, completed };

std::string_view to_string(StopReason r);
StopReason stop_reason_from_string(std::string_view s);
std::string_view to_string(LeveragingRoute r);

struct BoostConfig {
  std::size_t T = 50;
  std::size_t max_nodes = 1;
  double delta_init = 1.0;
  /// epsilon of the smoothness route.
  double epsilon = 0.1;
  /// pi passed to the smoothness route; alpha is the interval midpoint.
  double pi = 0.5;
  std::size_t precision_Z = 64;
  std::size_t max_retries = 5;
  std::size_t grid_points = 512;
  /// Scale of the random replacement for machine-zero offsets.
  double sanitize_scale = 1e-8;
  /// Relative perturbation used to move edges off declared jumps.
  double nudge_rel = 1e-6;
  /// Fraction of the edge the zero-prediction shift may spend.
  double shift_eps_frac = 0.5;
  /// Use the general leveraging procedure even when the loss declares beta.
  bool force_find_alpha = false;
  std::optional<double> h0;
  std::optional<double> v0;
  std::uint64_t seed = 0;
};

/// Scalars of one iteration in the order of the telemetry CSV, followed by
/// diagnostic extras that are not written to the CSV.
struct TelemetryRow {
  std::size_t t = 0;
  double train_loss = 0.0;
  double train_err = 0.0;
  double eta = 0.0;
  double eta_tilde = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double w1_bar = 0.0;
  double w2_bar = 0.0;
  double rho = 0.0;
  double M = 0.0;
  double weight_mass = 0.0;
  StopReason stop_reason = StopReason::none;

  double prev_loss = 0.0;
  /// Signed E[(h/M)^2 D_{e,v} F(e_prev)] at the chosen alpha.
  double w2_lhs = 0.0;
  double bound = 0.0;
  /// Smallest pi in [0, 1] for which alpha lies in the leveraging interval.
  double pi = 0.0;
  double z_limit = 0.0;
  LeveragingRoute route = LeveragingRoute::smoothness;
  bool leveraged = false;
  bool w2_fallback = false;
};

struct BoostIterState {
  std::vector<double> weights;
  std::vector<double> offsets;
  std::vector<double> edges_tilde;
  double eta = 0.0;
  double eta_tilde = 0.0;
  double weight_mass = 0.0;
  double w1_bar = 0.0;
  double w2_bar = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;
  double M = 0.0;
  StopReason stop_reason = StopReason::none;
};

struct Initialization {
  Ensemble ensemble;
  BoostIterState state;
  double v0 = 0.0;
  double F0 = 0.0;
};

/// Picks (h0, v0) with D_{v0} F(h0) != 0, trying the hints first and then
/// v0 in {-1, -0.1, 0.1, 1} (outer) by h0 in {0, 0.1, -0.1, 0.5, -0.5, 1, -1}.
/// Weights start uniform at -D_{v0} F(h0). Throws ConstantLossError when
/// every probed chord is flat.
Initialization initialize(const Loss& f, const Dataset& S, std::optional<double> h0_hint = std::nullopt,
                          std::optional<double> v0_hint = std::nullopt);

/// What one iteration saw and decided, for callers that audit runs.
struct IterationTrace {
  std::size_t t = 0;
  std::span<const double> weights;
  std::span<const double> signed_predictions;
  std::span<const double> prev_edges;
  std::span<const double> new_edges;
  std::span<const double> prev_offsets;
  std::span<const double> new_offsets;
  /// Whether new_offsets[i] came from the oracle (false when reused).
  std::span<const char> from_oracle;
  std::span<const double> next_weights;
  const LeveragingResult* leveraging = nullptr;
  const TelemetryRow* row = nullptr;
  double z_limit = 0.0;
};

using IterationObserver = std::function<void(const IterationTrace&)>;

struct BoostResult {
  Ensemble ensemble;
  std::vector<TelemetryRow> telemetry;
  double F0 = 0.0;
  double v0 = 0.0;
  StopReason stop_reason = StopReason::none;
  bool constant_loss = false;
  std::vector<std::string> warnings;
  double min_abs_eta_tilde = 0.0;
  double min_rho = 0.0;
  BoostIterState final_state;
};

/// Runs up to cfg.T boosting iterations.
BoostResult run(const Loss& f, const Dataset& S, const BoostConfig& cfg, const IterationObserver& observer = {});

/// a eta^2 (1 - a (1 + epsilon) M^2 W2) with a = alpha / eta, floored at 0.
double guaranteed_decrease_bound(const BoostIterState& state, double alpha);
double guaranteed_decrease_bound(double eta, double alpha, double epsilon, double M, double w2_bar);

/// sum_t W1^2 (1 - pi^2) eta~^2 / (W2 (1 + epsilon)) >= 4 (F0 - target) over
/// leveraged rows.
bool convergence_certificate(std::span<const TelemetryRow> telemetry, double F0, double target);

/// Moves alpha by random factors in [1 - rel, 1 + rel] until no prospective
/// edge prev_edges + alpha * signed_predictions is within 1e-12 of a declared
/// jump. Throws DiscontinuityCollisionError after 50 attempts.
double nudge_alpha(const Loss& f, double alpha, std::span<const double> prev_edges,
                   std::span<const double> signed_predictions, double rel, std::uint64_t seed);
double nudge_alpha(const Loss& f, double alpha, const Dataset& S, const Ensemble& H_prev, const DecisionTree& h,
                   double rel, std::uint64_t seed);

/// Column header of the telemetry CSV.
inline constexpr std::string_view kTelemetryHeader =
    "t,train_loss,train_err,eta,eta_tilde,alpha,epsilon,w1_bar,w2_bar,rho,M,weight_mass,stop_reason";

/// Shortest round-trip decimal form.
std::string format_double(double x);

std::string telemetry_csv(std::span<const TelemetryRow> rows);
void write_telemetry_csv(std::span<const TelemetryRow> rows, const std::string& path);

}  // namespace secantboost
