#include "gbk/velocity_grid.hpp"

#include <cmath>
#include <fmt/core.h>
#include <stdexcept>

namespace gbk {

VelocityGrid VelocityGrid::make(double R, int n, Vec3 const& center, double theta_tail)
{
    if (n < 3 || n % 2 == 0) {
        throw std::invalid_argument(fmt::format("grid n must be odd and >= 3 (got {})", n));
    }
    if (!(theta_tail > 0.0) || R < 5.0 * std::sqrt(theta_tail) * (1.0 - 1e-12)) {
        throw std::invalid_argument(
            fmt::format("grid radius {} is below 5 sqrt(theta) = {}", R, 5.0 * std::sqrt(theta_tail)));
    }
    return VelocityGrid{R, n, center};
}

} // namespace gbk
