#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace secantboost {

/// A jump discontinuity at abscissa `at` of height `magnitude`.
struct Jump {
  double at = 0.0;
  double magnitude = 0.0;
};

using LossParams = std::map<std::string, double>;

/// A margin loss F: R -> R, accessed only through values.
///
/// The metadata is declared by whoever builds the loss and is trusted by the
/// booster: `convex` selects the convex form of the OBI bound, `smoothness`
/// (beta) enables closed-form leveraging, `jumps` lists every point where F
/// is discontinuous and `feature_scale` is the shortest length over which the
/// shape of F changes (bump period, breakpoint gap). Instances are immutable
/// and safe to share.
class Loss {
 public:
  using Function = std::function<double(double)>;

  struct Traits {
    bool convex = false;
    std::optional<double> smoothness;
    std::vector<Jump> jumps;
    std::optional<double> feature_scale;
  };

  Loss(std::string name, Function f, Traits traits, LossParams params = {});

  double operator()(double z) const { return f_(z); }

  const std::string& name() const { return name_; }
  bool is_convex() const { return traits_.convex; }
  std::optional<double> smoothness_beta() const { return traits_.smoothness; }
  std::span<const Jump> discontinuities() const { return traits_.jumps; }
  std::optional<double> feature_scale() const { return traits_.feature_scale; }
  const LossParams& params() const { return params_; }

  /// Largest declared jump magnitude, 0 for continuous losses.
  double discontinuity() const;

  /// Breakpoints of a piecewise-linear table loss; empty otherwise.
  std::span<const std::pair<double, double>> table() const { return table_; }

 private:
  friend Loss make_piecewise_linear(std::vector<std::pair<double, double>> points);

  std::string name_;
  Function f_;
  Traits traits_;
  LossParams params_;
  std::vector<std::pair<double, double>> table_;
};

/// Smoothness constant of the logistic loss: sup |F''| = 1/4, reached at 0.
inline constexpr double kLogisticBeta = 0.25;
/// Smoothness constant of the square loss (1 - z)^2.
inline constexpr double kSquareBeta = 2.0;

/// Builds one of the built-in losses:
///   exponential, logistic, square, hinge, zero_one,
///   clipped_logistic (param q, default -2),
///   spring (param Q > 0, default 500): logistic + periodic bumps of period 1/Q,
///   spring_unit: the unit-amplitude variant with bumps vanishing at integers.
/// Unknown names and invalid parameters throw ConfigError.
Loss make_builtin(std::string_view name, const LossParams& params = {});

/// Names accepted by make_builtin.
std::vector<std::string> builtin_loss_names();

/// Linear interpolation between sorted breakpoints (z, F(z)), constant beyond
/// the first and last. Convexity is detected from the slopes.
Loss make_piecewise_linear(std::vector<std::pair<double, double>> points);

/// Reads a `z,F_of_z` CSV (header line required) into a table loss.
Loss load_loss_table(const std::string& path);

using LossFactory = std::function<Loss(const LossParams&)>;

/// Registers a user loss under `name` so the CLI and make_loss can find it.
void register_loss(std::string name, LossFactory factory);

/// Built-in or registered loss by name.
Loss make_loss(std::string_view name, const LossParams& params = {});

}  // namespace secantboost
