#pragma once

#include <cstddef>

#include "secantboost/loss.hpp"

namespace secantboost {

inline constexpr std::size_t kDefaultGridPoints = 512;

/// Triple (a, b, c) of an Optimal Bregman Information query: the chord goes
/// through (a, F(a)) and (b, F(b)) and the gap is searched over [a, c].
struct ObiQuery {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::size_t grid_points = kDefaultGridPoints;
};

/// F(zp) - F(z) - (zp - z) * D_v F(z).
double bregman_secant(const Loss& f, double zp, double z, double v);

/// Max of chord(x) - F(x) over x in [min(a,c), max(a,c)]. Scanned on
/// grid_points + 1 evenly spaced abscissae (both ends included), raised to
/// 8 points per feature_scale of F when it declares one, then the 64 best
/// discrete local maxima are refined by golden-section search inside their
/// two neighbouring cells. Never negative; 0 when a == b or a == c.
double obi(const Loss& f, const ObiQuery& q);

/// obi(z, z+v, z+v) for convex F, obi(z, z+v, zp) otherwise.
double q_star(const Loss& f, double z, double zp, double v, std::size_t grid_points = kDefaultGridPoints);

/// q_star(e_t, e_prev, v) <= z_limit. Decisions within 1e-6 (relative) of
/// the threshold are recomputed on a 4x finer grid. An offset too small to
/// move e_t is never feasible.
bool offset_feasible(const Loss& f, double e_t, double e_prev, double v, double z_limit,
                     std::size_t grid_points = kDefaultGridPoints);

/// sup_t (t s - F(t)) over t in [center - 50, center + 50].
double convex_conjugate(const Loss& f, double s, double center, std::size_t grid_points = 8192);

/// D_F(z || s) - r with s the secant slope of F over [z, z+v] and
/// D_F(z || s) = F(z) + F*(s) - z s. Requires a convex loss.
double convex_identity_residual(const Loss& f, double z, double v, double r,
                                std::size_t grid_points = kDefaultGridPoints);

}  // namespace secantboost
