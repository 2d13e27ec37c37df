#pragma once

#include "gbk/vec3.hpp"

#include <array>
#include <cstddef>

namespace gbk {

/// Uniform n^3 lattice on the cube of half-width R centered at `center`.
struct VelocityGrid {
    double R{1.0};
    int n{3};
    Vec3 center{};

    /// Throws unless n is odd and >= 3 and R >= 5 sqrt(theta_tail).
    static VelocityGrid make(double R, int n, Vec3 const& center, double theta_tail);

    [[nodiscard]] int half() const noexcept { return (n - 1) / 2; }
    [[nodiscard]] double h() const noexcept { return 2.0 * R / (n - 1); }
    [[nodiscard]] double quad_weight() const noexcept
    {
        double const s = h();
        return s * s * s;
    }
    [[nodiscard]] std::size_t size() const noexcept
    {
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    /// Integer offsets in [-half, half]^3 of node i.
    [[nodiscard]] std::array<int, 3> offset(std::size_t i) const noexcept
    {
        int const m = half();
        auto const nn = static_cast<std::size_t>(n);
        return {static_cast<int>(i / (nn * nn)) - m, static_cast<int>((i / nn) % nn) - m, static_cast<int>(i % nn) - m};
    }
    [[nodiscard]] Vec3 node(std::size_t i) const noexcept
    {
        auto const o = offset(i);
        double const s = h();
        return center + Vec3{o[0] * s, o[1] * s, o[2] * s};
    }
};

} // namespace gbk
