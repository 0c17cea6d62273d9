#include "covclust/rng.hpp"

#include <cmath>
#include <numbers>

namespace covclust {

namespace {
constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;
}

double CounterRng::uniform() {
    return static_cast<double>((*this)() >> 11) * kTwoPowMinus53;
}

double CounterRng::uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * kTwoPowMinus53;
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
    // Largest multiple of bound that fits, so the modulo is unbiased.
    const std::uint64_t limit = max() - max() % bound;
    for (;;) {
        const std::uint64_t x = (*this)();
        if (x < limit) {
            return x % bound;
        }
    }
}

double CounterRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace covclust
