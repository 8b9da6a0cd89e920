#include "secantboost/loss.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>

#include "secantboost/error.hpp"

namespace secantboost {

namespace {

double logistic(double z) {
  // log(1 + e^{-z}) without overflow for large |z|
  return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double param_or(const LossParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::map<std::string, LossFactory>& registry() {
  static std::map<std::string, LossFactory> r;
  return r;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Loss::Loss(std::string name, Function f, Traits traits, LossParams params)
    : name_(std::move(name)), f_(std::move(f)), traits_(std::move(traits)), params_(std::move(params)) {
  if (!f_) throw ConfigError("loss '" + name_ + "' has no evaluation function");
  if (traits_.smoothness && !(*traits_.smoothness >= 0.0 && std::isfinite(*traits_.smoothness)))
    throw ConfigError("loss '" + name_ + "': smoothness must be a finite nonnegative real");
  for (const Jump& j : traits_.jumps) {
    if (!std::isfinite(j.at) || !(j.magnitude >= 0.0))
      throw ConfigError("loss '" + name_ + "': malformed discontinuity");
  }
  if (traits_.feature_scale && !(*traits_.feature_scale > 0.0 && std::isfinite(*traits_.feature_scale)))
    throw ConfigError("loss '" + name_ + "': feature scale must be a positive real");
}

double Loss::discontinuity() const {
  double d = 0.0;
  for (const Jump& j : traits_.jumps) d = std::max(d, j.magnitude);
  return d;
}

Loss make_builtin(std::string_view name, const LossParams& params) {
  if (name == "exponential") {
    return Loss("exponential", [](double z) { return std::exp(-z); }, {.convex = true});
  }
  if (name == "logistic") {
    return Loss("logistic", logistic, {.convex = true, .smoothness = kLogisticBeta});
  }
  if (name == "square") {
    return Loss("square", [](double z) { return (1.0 - z) * (1.0 - z); },
                {.convex = true, .smoothness = kSquareBeta});
  }
  if (name == "hinge") {
    return Loss("hinge", [](double z) { return std::max(0.0, 1.0 - z); }, {.convex = true});
  }
  if (name == "zero_one") {
    return Loss("zero_one", [](double z) { return z <= 0.0 ? 1.0 : 0.0; },
                {.convex = false, .jumps = {Jump{0.0, 1.0}}});
  }
  if (name == "clipped_logistic") {
    const double q = param_or(params, "q", -2.0);
    if (!std::isfinite(q)) throw ConfigError("clipped_logistic: q must be finite");
    const double plateau = logistic(q);
    return Loss("clipped_logistic", [plateau](double z) { return std::min(logistic(z), plateau); },
                {.convex = false}, {{"q", q}});
  }
  if (name == "spring") {
    const double Q = param_or(params, "Q", 500.0);
    if (!(Q > 0.0) || !std::isfinite(Q)) throw ConfigError("spring: Q must be a positive real");
    return Loss(
        "spring",
        [Q](double z) {
          const double u = Q * z - 0.5;
          // nearbyint rounds half to even under the default rounding mode
          const double r = u - std::nearbyint(u);
          return logistic(z) + (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * r * r))) / Q;
        },
        {.convex = false, .feature_scale = 1.0 / Q}, {{"Q", Q}});
  }
  if (name == "spring_unit") {
    return Loss(
        "spring_unit",
        [](double z) {
          const double r = z - std::nearbyint(z);
          return logistic(z) + 1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * r * r));
        },
        {.convex = false, .feature_scale = 1.0});
  }
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

std::vector<std::string> builtin_loss_names() {
  return {"exponential", "logistic", "square", "hinge", "zero_one",
          "clipped_logistic", "spring", "spring_unit"};
}

Loss make_piecewise_linear(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw DataError("loss table has no breakpoints");
  std::sort(points.begin(), points.end());
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!std::isfinite(points[k].first) || !std::isfinite(points[k].second))
      throw DataError("loss table contains a non-finite value");
    if (k > 0 && points[k].first == points[k - 1].first)
      throw DataError("loss table has duplicate abscissa");
  }
  bool convex = true;
  for (std::size_t k = 2; k < points.size(); ++k) {
    const double s0 = (points[k - 1].second - points[k - 2].second) / (points[k - 1].first - points[k - 2].first);
    const double s1 = (points[k].second - points[k - 1].second) / (points[k].first - points[k - 1].first);
    if (s1 < s0) convex = false;
  }
  // Constant extension makes the loss non-convex unless both end slopes are flat.
  if (points.size() >= 2) {
    const auto& p = points;
    const double first = (p[1].second - p[0].second) / (p[1].first - p[0].first);
    const double last = (p.back().second - p[p.size() - 2].second) / (p.back().first - p[p.size() - 2].first);
    if (first > 0.0 || last < 0.0) convex = false;
  }

  std::optional<double> gap;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double d = points[k].first - points[k - 1].first;
    gap = gap ? std::min(*gap, d) : d;
  }
  auto shared = std::make_shared<const std::vector<std::pair<double, double>>>(points);
  Loss loss(
      "table",
      [shared](double z) {
        const auto& p = *shared;
        if (z <= p.front().first) return p.front().second;
        if (z >= p.back().first) return p.back().second;
        auto hi = std::upper_bound(p.begin(), p.end(), z,
                                   [](double v, const std::pair<double, double>& e) { return v < e.first; });
        auto lo = hi - 1;
        const double t = (z - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
      },
      {.convex = convex, .feature_scale = gap});
  loss.table_ = std::move(points);
  return loss;
}

Loss load_loss_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open loss table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("loss table '" + path + "' is empty");
  std::vector<std::pair<double, double>> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw DataError(path + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      const double z = std::stod(a);
      const double f = std::stod(b);
      points.emplace_back(z, f);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) + ": unparseable number");
    }
  }
  return make_piecewise_linear(std::move(points));
}

void register_loss(std::string name, LossFactory factory) {
  std::lock_guard lock(registry_mutex());
  registry()[std::move(name)] = std::move(factory);
}

Loss make_loss(std::string_view name, const LossParams& params) {
  {
    std::lock_guard lock(registry_mutex());
    auto it = registry().find(std::string(name));
    if (it != registry().end()) return it->second(params);
  }
  return make_builtin(name, params);
}

}  // namespace secantboost
