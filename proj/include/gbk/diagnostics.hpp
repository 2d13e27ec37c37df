#pragma once

#include "gbk/ensemble.hpp"
#include "gbk/kinetics.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace gbk {

MomentRecord moments(ParticleEnsemble const& ens, std::vector<WeightParams> const& norms = {});

/// Monte Carlo estimate of the integral of f <v>^q m(v), accumulated in log space.
double weighted_norm_estimate(ParticleEnsemble const& ens, WeightParams const& w);
double log_weighted_norm_estimate(ParticleEnsemble const& ens, WeightParams const& w);

/// Shell-averaged density about a center on uniform bins [0, r_max].
struct RadialProfile {
    std::vector<double> bin_edges;
    std::vector<double> density;
    std::vector<double> density_stderr; // empty when unknown
    Vec3 center{};
    double total_mass{0.0};   // mass inside r_max
    double outside_mass{0.0}; // mass beyond r_max
    bool r_max_warning{false};

    [[nodiscard]] std::size_t n_bins() const noexcept { return density.size(); }
    [[nodiscard]] double r_max() const { return bin_edges.back(); }
    [[nodiscard]] double midpoint(std::size_t k) const { return 0.5 * (bin_edges[k] + bin_edges[k + 1]); }
    [[nodiscard]] double shell_volume(std::size_t k) const;
    [[nodiscard]] double shell_mass(std::size_t k) const { return density[k] * shell_volume(k); }
    /// Mass-weighted (1/3) mean squared distance from the center, using bin midpoints.
    [[nodiscard]] double temperature() const;
    void validate() const;
};

std::vector<double> uniform_edges(std::size_t n_bins, double r_max);

RadialProfile radial_profile(ParticleEnsemble const& ens, Vec3 const& center, std::size_t n_bins, double r_max);

/// Exact shell averages of a radial density given as a function of r.
RadialProfile profile_from_density(std::function<double(double)> const& f, Vec3 const& center,
                                   std::size_t n_bins, double r_max);

/// Exact shell averages of a Maxwellian of temperature theta on the given edges.
RadialProfile maxwellian_profile(std::vector<double> const& edges, Vec3 const& center, double theta);

/// Weighted radial L1 distance between two profiles on identical bins.
double profile_distance(RadialProfile const& p, RadialProfile const& q, WeightParams const& w);

/// Distance from p to the Maxwellian M(u0, theta_sharp(e, theta0)).
double weighted_distance(RadialProfile const& p, BathParams const& bath, double e, WeightParams const& w);

struct RateFit {
    double rate{0.0};
    double intercept{0.0};
    double r_squared{0.0};
    double t_start{0.0};
    double t_end{0.0};
    std::size_t n_points{0};
};

/// Log-linear least squares of value - floor against t on the prefix where it stays positive.
RateFit fit_exponential_rate(std::vector<std::pair<double, double>> const& series, double floor);

/// nu_e(v) = 4 pi int |v - w| M0(w) dw in closed form.
double collision_frequency_nu(Vec3 const& v, BathParams const& bath);
double collision_frequency_nu_radial(double d, double theta0);

/// Same quantity by nested adaptive quadrature (independent of the closed form).
double collision_frequency_quadrature(double d, double theta0);

struct NuBounds {
    double nu0{0.0};
    double nu1{0.0};
    double grid_min{0.0};
    double grid_max{0.0};
    double d_max{0.0};
    std::size_t n_grid{0};
};

/// Extremes of nu_e(v) / <v - u0> on a uniform grid of |v - u0|, widened by the 4 pi asymptote.
NuBounds collision_frequency_bounds(BathParams const& bath, double d_max, std::size_t n_grid);

} // namespace gbk
