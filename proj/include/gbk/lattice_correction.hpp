#pragma once

#include "gbk/vec3.hpp"

#include <array>
#include <functional>
#include <vector>

namespace gbk {

/// Trapezoid-rule defect for integrands g(zhat . a) / |z| on the unit cubic lattice.
///
/// constant(g, a) = lim_{L->inf} sum'_j g(jhat . a) / |j| e^{-|j|^2/L^2} - (L^2 / 2) 2 pi int_{-1}^{1} g(|a| x) dx,
/// extrapolated from L = 4, 6, 8. With lattice spacing h the sum h^3 sum'_j s(h j) undershoots the
/// integral by h^2 constant, so -h^2 constant is the missing diagonal weight. g must be even.
class SingularCorrection {
public:
    SingularCorrection();

    [[nodiscard]] double constant(std::function<double(double)> const& g, Vec3 const& a) const;
    [[nodiscard]] std::array<double, 3> raw_sums(std::function<double(double)> const& g, Vec3 const& a) const;

    static constexpr std::array<double, 3> kScales{4.0, 6.0, 8.0};

private:
    struct Point {
        Vec3 dir;
        std::array<double, 3> w;
    };
    std::vector<Point> points_;
};

} // namespace gbk
