#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "secantboost/loss.hpp"

namespace secantboost {

/// Offsets with magnitude below this are treated as zero and rejected.
inline constexpr double kMinOffsetMagnitude = 1e-300;
/// Largest supported derivative order (the expansion has 2^n terms).
inline constexpr std::size_t kMaxDerivativeOrder = 16;

/// Ordered offsets v_1..v_n of a nested secant derivative. Every offset is
/// finite and nonzero; n may be 0.
class OffsetList {
 public:
  OffsetList() = default;
  OffsetList(std::initializer_list<double> offsets);
  explicit OffsetList(std::vector<double> offsets);

  std::span<const double> values() const { return offsets_; }
  std::size_t order() const { return offsets_.size(); }

 private:
  void validate() const;

  std::vector<double> offsets_;
};

/// Throws std::invalid_argument unless v is finite and |v| >= kMinOffsetMagnitude.
void require_offset(double v);

/// Secant slope (F(z+v) - F(z)) / v.
double v_derivative(const Loss& f, double z, double v);

/// Nested secant derivative D_{v_1..v_n} F(z). Uses the closed-form
/// alternating sum for n <= 2 and the recursion above.
double v_derivative(const Loss& f, double z, const OffsetList& offsets);

/// Definition by recursion: D_V F(z) = (G(z + v_n) - G(z)) / v_n with
/// G = D_{V \ v_n} F. Costs 2^n evaluations, like the expansion.
double v_derivative_recursive(const Loss& f, double z, const OffsetList& offsets);

/// Alternating sum over sigma in {0,1}^n of (-1)^(n-|sigma|) F(z + sigma.v),
/// divided by the product of the offsets. Independent of offset order.
double v_derivative_expansion(const Loss& f, double z, const OffsetList& offsets);

struct ShiftComposition {
  double lhs = 0.0;  ///< D_v F(z + shift)
  double rhs = 0.0;  ///< D_v F(z) + shift * D_{shift,v} F(z)
};

/// Both sides of the shift identity for secant derivatives, evaluated
/// independently so callers can compare them.
ShiftComposition shift_compose_check(const Loss& f, double z, double shift, double v);

}  // namespace secantboost
