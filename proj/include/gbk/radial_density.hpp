#pragma once

#include "gbk/diagnostics.hpp"
#include "gbk/vec3.hpp"

#include <vector>

namespace gbk {

/// Radially symmetric density F(|v - center|), either a Maxwellian or a
/// monotone-cubic interpolant of a binned profile.
class RadialDensity {
public:
    static RadialDensity maxwellian(Vec3 const& center, double theta, double mass = 1.0);
    static RadialDensity from_profile(RadialProfile const& p);

    [[nodiscard]] double operator()(double r) const;
    [[nodiscard]] double at(Vec3 const& v) const { return (*this)(norm(v - center_)); }

    /// Integral of F over the plane at signed distance s from the center.
    [[nodiscard]] double plane_integral(double s) const;

    /// nu_F(d) = 4 pi int |v - w| F(w) dw with d = |v - center|.
    [[nodiscard]] double collision_frequency(double d) const;

    /// int_0^{2 pi} F(sqrt(A + B cos phi)) dphi for A >= B >= 0.
    [[nodiscard]] double ring_integral(double A, double B) const;

    [[nodiscard]] double mass() const noexcept { return mass_; }
    [[nodiscard]] double temperature() const noexcept { return theta_; }
    [[nodiscard]] double cutoff() const noexcept { return r_cut_; }
    [[nodiscard]] double clipped_mass() const noexcept { return clipped_; }
    [[nodiscard]] bool is_maxwellian() const noexcept { return gaussian_; }
    [[nodiscard]] Vec3 const& center() const noexcept { return center_; }

private:
    RadialDensity() = default;
    void tabulate_integrals();

    bool gaussian_{true};
    Vec3 center_{};
    double theta_{1.0};
    double mass_{1.0};
    double amp_{1.0}; // Gaussian prefactor
    double r_cut_{0.0};
    double clipped_{0.0};
    double dr_{0.0};
    std::vector<double> f_;     // F on the fine table
    std::vector<double> tail_;  // 2 pi int_r^cut r F dr
    std::vector<double> m0_;    // int_0^r 4 pi r^2 F dr
    std::vector<double> m1_;    // int_0^r 4 pi r^3 F dr
    std::vector<double> m_1_;   // int_0^r 4 pi r F dr
    std::vector<double> m2_;    // int_0^r 4 pi r^4 F dr
};

} // namespace gbk
