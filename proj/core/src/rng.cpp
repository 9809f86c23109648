#include "svx/rng.hpp"

#include <cmath>
#include <numbers>

namespace svx {

double CounterRng::normal(std::uint64_t index) const noexcept {
    // 1 - u keeps the logarithm argument in (0, 1].
    const double u1 = 1.0 - uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace svx
