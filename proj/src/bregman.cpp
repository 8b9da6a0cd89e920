#include "secantboost/bregman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "secantboost/error.hpp"
#include "secantboost/quantum_calculus.hpp"

namespace secantboost {

namespace {

constexpr double kInvPhi = 0.6180339887498949;
constexpr std::size_t kPolishedPeaks = 64;
constexpr double kPointsPerFeature = 8.0;
constexpr std::size_t kMaxGridPoints = std::size_t{1} << 22;

// Golden-section maximisation of g on [lo, hi]; returns the best value seen,
// never below `floor`.
template <class G>
double golden_max(G&& g, double lo, double hi, double floor) {
  double best = floor;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double g1 = g(x1);
  double g2 = g(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-15 * (1.0 + std::fabs(lo) + std::fabs(hi)); ++it) {
    if (g1 > g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - kInvPhi * (hi - lo);
      g1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + kInvPhi * (hi - lo);
      g2 = g(x2);
    }
    best = std::max({best, g1, g2});
  }
  return std::max({best, g1, g2});
}

// Max of g over [lo, hi] by grid scan + golden polish of the best discrete
// local maxima.
template <class G>
double scan_max(G&& g, double lo, double hi, std::size_t n) {
  std::vector<double> x(n + 1), y(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    x[k] = k == n ? hi : lo + (hi - lo) * (static_cast<double>(k) / static_cast<double>(n));
    y[k] = g(x[k]);
  }
  double best = *std::max_element(y.begin(), y.end());
  std::vector<std::size_t> peaks;
  for (std::size_t k = 1; k < n; ++k) {
    if (y[k] >= y[k - 1] && y[k] >= y[k + 1] && (y[k] > y[k - 1] || y[k] > y[k + 1])) peaks.push_back(k);
  }
  if (peaks.size() > kPolishedPeaks) {
    std::partial_sort(peaks.begin(), peaks.begin() + kPolishedPeaks, peaks.end(),
                      [&](std::size_t a, std::size_t b) { return y[a] > y[b] || (y[a] == y[b] && a < b); });
    peaks.resize(kPolishedPeaks);
  }
  for (std::size_t k : peaks) best = std::max(best, golden_max(g, x[k - 1], x[k + 1], y[k]));
  return best;
}

std::size_t grid_for(const Loss& f, double length, std::size_t grid_points) {
  const auto scale = f.feature_scale();
  if (!scale) return grid_points;
  const double wanted = std::ceil(kPointsPerFeature * length / *scale);
  if (!(wanted < static_cast<double>(kMaxGridPoints))) return std::max(grid_points, kMaxGridPoints);
  return std::max(grid_points, static_cast<std::size_t>(wanted));
}

}  // namespace

double bregman_secant(const Loss& f, double zp, double z, double v) {
  return f(zp) - f(z) - (zp - z) * v_derivative(f, z, v);
}

double obi(const Loss& f, const ObiQuery& q) {
  if (q.grid_points < 2) throw std::invalid_argument("OBI grid needs at least 2 points");
  if (q.a == q.b || q.a == q.c) return 0.0;
  const double fa = f(q.a);
  const double slope = (f(q.b) - fa) / (q.b - q.a);
  auto gap = [&](double x) { return fa + (x - q.a) * slope - f(x); };
  const double lo = std::min(q.a, q.c);
  const double hi = std::max(q.a, q.c);
  return std::max(0.0, scan_max(gap, lo, hi, grid_for(f, hi - lo, q.grid_points)));
}

double q_star(const Loss& f, double z, double zp, double v, std::size_t grid_points) {
  require_offset(v);
  const double b = z + v;
  if (f.is_convex()) return obi(f, {z, b, b, grid_points});
  return obi(f, {z, b, zp, grid_points});
}

bool offset_feasible(const Loss& f, double e_t, double e_prev, double v, double z_limit, std::size_t grid_points) {
  if (!(z_limit > 0.0)) throw std::invalid_argument("z_limit must be positive");
  if (e_t + v == e_t) return false;
  double q = q_star(f, e_t, e_prev, v, grid_points);
  if (std::fabs(q - z_limit) <= 1e-6 * z_limit) q = q_star(f, e_t, e_prev, v, 4 * grid_points);
  return q <= z_limit;
}

double convex_conjugate(const Loss& f, double s, double center, std::size_t grid_points) {
  auto g = [&](double t) { return t * s - f(t); };
  return scan_max(g, center - 50.0, center + 50.0, grid_for(f, 100.0, grid_points));
}

double convex_identity_residual(const Loss& f, double z, double v, double r, std::size_t grid_points) {
  if (!f.is_convex()) throw ConfigError("convex identity needs a convex loss");
  const double s = v_derivative(f, z, v);
  const double n = std::max<std::size_t>(grid_points, 8192);
  const double divergence = f(z) + convex_conjugate(f, s, z, static_cast<std::size_t>(n)) - z * s;
  return divergence - r;
}

}  // namespace secantboost
