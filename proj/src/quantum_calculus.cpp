#include "secantboost/quantum_calculus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace secantboost {

namespace {

double recurse(const Loss& f, double z, std::span<const double> v) {
  if (v.empty()) return f(z);
  const double last = v.back();
  const auto head = v.first(v.size() - 1);
  return (recurse(f, z + last, head) - recurse(f, z, head)) / last;
}

}  // namespace

void require_offset(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("offset must be finite");
  if (std::fabs(v) < kMinOffsetMagnitude)
    throw std::invalid_argument("offset must be nonzero (|v| >= 1e-300)");
}

OffsetList::OffsetList(std::initializer_list<double> offsets) : offsets_(offsets) { validate(); }

OffsetList::OffsetList(std::vector<double> offsets) : offsets_(std::move(offsets)) { validate(); }

void OffsetList::validate() const {
  if (offsets_.size() > kMaxDerivativeOrder)
    throw std::invalid_argument("derivative order " + std::to_string(offsets_.size()) + " exceeds " +
                                std::to_string(kMaxDerivativeOrder));
  for (double v : offsets_) require_offset(v);
}

double v_derivative(const Loss& f, double z, double v) {
  require_offset(v);
  return (f(z + v) - f(z)) / v;
}

double v_derivative(const Loss& f, double z, const OffsetList& offsets) {
  if (offsets.order() <= 2) return v_derivative_expansion(f, z, offsets);
  return v_derivative_recursive(f, z, offsets);
}

double v_derivative_recursive(const Loss& f, double z, const OffsetList& offsets) {
  return recurse(f, z, offsets.values());
}

double v_derivative_expansion(const Loss& f, double z, const OffsetList& offsets) {
  const auto v = offsets.values();
  const std::size_t n = v.size();
  if (n == 0) return f(z);
  if (n == 1) return (f(z + v[0]) - f(z)) / v[0];
  if (n == 2) return (f(z + v[0] + v[1]) - f(z + v[0]) - f(z + v[1]) + f(z)) / (v[0] * v[1]);

  double sum = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double shift = 0.0;
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        shift += v[i];
        ++ones;
      }
    }
    const double term = f(z + shift);
    sum += ((n - ones) % 2 == 0) ? term : -term;
  }
  double prod = 1.0;
  for (double x : v) prod *= x;
  return sum / prod;
}

ShiftComposition shift_compose_check(const Loss& f, double z, double shift, double v) {
  require_offset(shift);
  require_offset(v);
  ShiftComposition out;
  out.lhs = v_derivative(f, z + shift, v);
  out.rhs = v_derivative(f, z, v) + shift * v_derivative_expansion(f, z, OffsetList{shift, v});
  return out;
}

}  // namespace secantboost
