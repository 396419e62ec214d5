#include <cmath>
#include <numbers>

#include "eeg/bench.hpp"

namespace eeg {

double GaussianStream::next() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = static_cast<double>((rng_() >> 11) + 1) * kScale;  // (0, 1]
  const double u2 = static_cast<double>(rng_() >> 11) * kScale;        // [0, 1)
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

}  // namespace eeg
