#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "secantboost/bregman.hpp"
#include "secantboost/loss.hpp"

namespace secantboost {

struct OffsetRequest {
  double e_t = 0.0;     ///< new edge
  double e_prev = 0.0;  ///< previous edge, must differ from e_t
  double z_limit = 0.0; ///< OBI budget, > 0
  std::size_t precision_Z = 64;
  std::size_t max_retries = 5;
  std::size_t grid_points = kDefaultGridPoints;
};

/// Scans z_c = e_t + k (e_prev - e_t) / Z strictly between the two edges,
/// keeps the secant from (e_t, F(e_t)) with extremal slope (minimal when
/// heading right, maximal when heading left; first extremum wins) and returns
/// v = z* - e_t if it is feasible. Otherwise Z is multiplied by 4, up to
/// max_retries times. Empty when every attempt fails.
std::optional<double> find_offset(const Loss& f, const OffsetRequest& req);

/// For convex F: halves v from e_prev - e_t until feasible, at most 60 times.
std::optional<double> find_offset_convex_dichotomic(const Loss& f, double e_t, double e_prev, double z_limit,
                                                    std::size_t grid_points = kDefaultGridPoints);

/// Returns v unless it is machine zero (|v| below the offset floor), in which
/// case a value uniform in +-[scale/2, scale] drawn from `seed` replaces it.
double sanitize_offset(double v, double scale, std::uint64_t seed);

}  // namespace secantboost
