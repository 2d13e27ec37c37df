#pragma once

#include "gbk/rng.hpp"
#include "gbk/vec3.hpp"

#include <random>

namespace gbk {

struct RestitutionParams {
    double alpha{1.0};
    double e{1.0};

    void validate() const;
};

/// Bath Maxwellian M0 with unit density.
struct BathParams {
    Vec3 u0{};
    double theta0{1.0};

    void validate() const;
};

/// Weight <v>^q exp(b <v>^beta).
struct WeightParams {
    double b{0.1};
    double beta{0.5};
    int q{1};

    void validate() const;
};

struct CollisionPair {
    Vec3 v;
    Vec3 v_star;
};

/// Throws std::invalid_argument unless |n|^2 - 1 is within 1e-12.
void require_unit(Vec3 const& n, char const* what);
void require_restitution(double coeff, char const* what);

CollisionPair post_collision_n(Vec3 const& v, Vec3 const& v_star, Vec3 const& n, double alpha);
CollisionPair post_collision_sigma(Vec3 const& v, Vec3 const& v_star, Vec3 const& sigma, double alpha);

/// Kinetic energy change |v'|^2 + |v'_*|^2 - |v|^2 - |v_*|^2 of one collision.
double energy_change(Vec3 const& v, Vec3 const& v_star, Vec3 const& n, double alpha);

/// Closed-form value -((1 - alpha^2) / 2) (u.n)^2.
double energy_change_formula(Vec3 const& v, Vec3 const& v_star, Vec3 const& n, double alpha);

double maxwellian_density(Vec3 const& v, BathParams const& bath);

/// Maxwellian density at distance r from its center.
double maxwellian_radial(double r, double theta);

/// Mass of a centered Maxwellian inside the ball of radius r.
double maxwellian_ball_mass(double r, double theta);

template <class Generator>
Vec3 maxwellian_sample(BathParams const& bath, Generator& rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    double const s = std::sqrt(bath.theta0);
    double const gx = gauss(rng);
    double const gy = gauss(rng);
    double const gz = gauss(rng);
    return bath.u0 + Vec3{gx, gy, gz} * s;
}

/// Uniform direction on the unit sphere.
template <class Generator>
Vec3 uniform_unit_vector(Generator& rng)
{
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> phi_dist(0.0, 2.0 * 3.14159265358979323846);
    double const c = unif(rng);
    double const phi = phi_dist(rng);
    double const s = std::sqrt(std::max(0.0, 1.0 - c * c));
    return {s * std::cos(phi), s * std::sin(phi), c};
}

/// Temperature (1+e)/(3-e) theta0 of the elastic-limit equilibrium.
double theta_sharp(double e, double theta0);

double weight_m(Vec3 const& v, WeightParams const& w);
double log_weight_m(Vec3 const& v, WeightParams const& w);
double log_weight_radial(double r, WeightParams const& w);

} // namespace gbk
