#include "dualmean/rng.hpp"

#include <cmath>
#include <numbers>

namespace dualmean {

double StreamRng::next_normal(double mean, double sd) {
    if (has_cached_) {
        has_cached_ = false;
        return mean + sd * cached_;
    }
    // Box-Muller on (0,1] x [0,1).
    const double u1 = 1.0 - next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return mean + sd * r * std::cos(theta);
}

std::uint64_t StreamRng::next_below(std::uint64_t bound) {
    // Rejection above the largest multiple of bound keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return x % bound;
}

}  // namespace dualmean
