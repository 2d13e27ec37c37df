#pragma once

#include "gbk/kinetics.hpp"
#include "gbk/operators.hpp"

#include <string>
#include <vector>

namespace gbk {

/// Constants of the explicit bath kernel (C/|v - v_*|) exp{-c0 ((1+mu)|v - v_*| + X)^2}.
struct KernelConstants {
    double C{1.0};
    double mu{1.0};

    /// Values for which the kernel is the exact gain kernel of the bath operator.
    static KernelConstants derived(double e, double theta0);
};

/// (|v - u0|^2 - |v_* - u0|^2) / |v - v_*|
double kernel_exponent_shift(Vec3 const& v, Vec3 const& v_star, Vec3 const& u0);

/// Throws std::invalid_argument when v == v_star.
double kernel_k_e(Vec3 const& v, Vec3 const& v_star, BathParams const& bath, KernelConstants const& k);
double kernel_k_e(Vec3 const& v, Vec3 const& v_star, double e, BathParams const& bath);

/// int k_e(v, v_*) dv by nested adaptive quadrature in spherical coordinates about v_*.
double kernel_mass(Vec3 const& v_star, BathParams const& bath, KernelConstants const& k);

/// Gain part of column j of an assembled bath operator: int L^+(delta_{v_j}) dv on the grid.
double discrete_gain_mass(OperatorMatrix const& m, std::size_t j);

struct KernelBoundSample {
    double speed{0.0}; // |v_* - u0| / sqrt(theta0)
    double h{0.0};     // H(v_*) / (<v_*>^q m(v_*))
    double ratio{0.0}; // H / [(1 + |v_*|^{1-beta}) <v_*>^q m(v_*)]
    bool converged{true};
    std::string error;
};

struct KernelBoundReport {
    std::vector<KernelBoundSample> samples;
    double K{0.0}; // smallest constant making the bound hold on the samples
    bool trend_ok{false};
    /// Least-squares change of the ratio across the trend speeds, against log speed, relative to its mean.
    double fitted_increase{0.0};
    double max_step_growth{0.0}; // max over consecutive trend samples of ratio_{k+1}/ratio_k
};

/// H(v_*) = int k_e(v, v_*) <v>^q m(v) dv at v_* = u0 + s sqrt(theta0) d, d along u0 (or x when u0 = 0).
/// trend_ok fails when the fitted increase over trend_speeds (all positive) exceeds 5%.
KernelBoundReport kernel_bound_check(WeightParams const& w, BathParams const& bath, KernelConstants const& k,
                                     std::vector<double> const& speeds,
                                     std::vector<double> const& trend_speeds = {1.0, 2.0, 4.0, 8.0});

} // namespace gbk
