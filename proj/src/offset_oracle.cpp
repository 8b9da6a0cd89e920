#include "secantboost/offset_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "secantboost/error.hpp"
#include "secantboost/quantum_calculus.hpp"
#include "secantboost/random.hpp"

namespace secantboost {

namespace {

double scan_extremal(const Loss& f, double e_t, double e_prev, double Z) {
  const double delta = (e_prev - e_t) / Z;
  const double f_t = f(e_t);
  double best_v = 0.0;
  double best_s = 0.0;
  bool have = false;
  for (double k = 1.0;; k += 1.0) {
    const double zc = e_t + k * delta;
    if (!((zc - e_t) * (zc - e_prev) < 0.0)) break;
    const double v = zc - e_t;
    const double s = (f(zc) - f_t) / v;
    if (!have || (delta > 0.0 && s < best_s) || (delta < 0.0 && s > best_s)) {
      best_s = s;
      best_v = v;
      have = true;
    }
  }
  // The edges are too close for any interior abscissa to be representable.
  return have ? best_v : e_prev - e_t;
}

}  // namespace

std::optional<double> find_offset(const Loss& f, const OffsetRequest& req) {
  if (!(req.z_limit > 0.0)) throw std::invalid_argument("z_limit must be positive");
  if (req.precision_Z < 2) throw std::invalid_argument("precision_Z must be at least 2");
  if (req.e_t == req.e_prev) throw std::invalid_argument("find_offset needs distinct edges");
  double Z = static_cast<double>(req.precision_Z);
  for (std::size_t attempt = 0; attempt <= req.max_retries; ++attempt, Z *= 4.0) {
    const double v = scan_extremal(f, req.e_t, req.e_prev, Z);
    if (std::fabs(v) < kMinOffsetMagnitude) break;
    if (offset_feasible(f, req.e_t, req.e_prev, v, req.z_limit, req.grid_points)) return v;
  }
  return std::nullopt;
}

std::optional<double> find_offset_convex_dichotomic(const Loss& f, double e_t, double e_prev, double z_limit,
                                                    std::size_t grid_points) {
  if (!f.is_convex()) throw ConfigError("dichotomic offset search needs a convex loss");
  if (e_t == e_prev) throw std::invalid_argument("find_offset needs distinct edges");
  double v = e_prev - e_t;
  for (int k = 0; k <= 60; ++k, v /= 2.0) {
    if (std::fabs(v) < kMinOffsetMagnitude) break;
    if (offset_feasible(f, e_t, e_prev, v, z_limit, grid_points)) return v;
  }
  return std::nullopt;
}

double sanitize_offset(double v, double scale, std::uint64_t seed) {
  if (!(scale > 0.0)) throw std::invalid_argument("sanitize scale must be positive");
  if (std::isfinite(v) && std::fabs(v) >= kMinOffsetMagnitude) return v;
  Rng rng(seed);
  const double magnitude = scale * (0.5 + 0.5 * rng.uniform());
  return rng.bernoulli(0.5) ? magnitude : -magnitude;
}

}  // namespace secantboost
