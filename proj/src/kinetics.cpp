#include "gbk/kinetics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gbk {

namespace {

void require_finite(Vec3 const& v, char const* what)
{
    if (!is_finite(v)) {
        throw std::invalid_argument(std::string(what) + " has non-finite components");
    }
}

} // namespace

void require_unit(Vec3 const& n, char const* what)
{
    require_finite(n, what);
    if (std::abs(norm2(n) - 1.0) > 1e-12) {
        throw std::invalid_argument(std::string(what) + " must be a unit vector");
    }
}

void require_restitution(double coeff, char const* what)
{
    if (!(coeff > 0.0 && coeff <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in (0, 1]");
    }
}

void RestitutionParams::validate() const
{
    require_restitution(alpha, "alpha");
    require_restitution(e, "e");
}

void BathParams::validate() const
{
    require_finite(u0, "u0");
    if (!(theta0 > 0.0) || !std::isfinite(theta0)) {
        throw std::invalid_argument("theta0 must be positive");
    }
}

void WeightParams::validate() const
{
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw std::invalid_argument("weight b must be positive");
    }
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("weight beta must lie in (0, 1)");
    }
    if (q < 0) {
        throw std::invalid_argument("weight q must be nonnegative");
    }
}

CollisionPair post_collision_n(Vec3 const& v, Vec3 const& v_star, Vec3 const& n, double alpha)
{
    require_finite(v, "v");
    require_finite(v_star, "v_star");
    require_unit(n, "n");
    require_restitution(alpha, "alpha");
    double const un = dot(v - v_star, n);
    Vec3 const dv = n * (0.5 * (1.0 + alpha) * un);
    return {v - dv, v_star + dv};
}

CollisionPair post_collision_sigma(Vec3 const& v, Vec3 const& v_star, Vec3 const& sigma, double alpha)
{
    require_finite(v, "v");
    require_finite(v_star, "v_star");
    require_unit(sigma, "sigma");
    require_restitution(alpha, "alpha");
    Vec3 const u = v - v_star;
    double const speed = norm(u);
    if (speed == 0.0) {
        throw std::invalid_argument("sigma form needs v != v_star");
    }
    Vec3 const dv = (u - sigma * speed) * (0.25 * (1.0 + alpha));
    return {v - dv, v_star + dv};
}

double energy_change(Vec3 const& v, Vec3 const& v_star, Vec3 const& n, double alpha)
{
    auto const out = post_collision_n(v, v_star, n, alpha);
    return (norm2(out.v) + norm2(out.v_star)) - (norm2(v) + norm2(v_star));
}

double energy_change_formula(Vec3 const& v, Vec3 const& v_star, Vec3 const& n, double alpha)
{
    require_unit(n, "n");
    double const un = dot(v - v_star, n);
    return -0.5 * (1.0 - alpha * alpha) * un * un;
}

double maxwellian_radial(double r, double theta)
{
    return std::pow(2.0 * std::numbers::pi * theta, -1.5) * std::exp(-r * r / (2.0 * theta));
}

double maxwellian_density(Vec3 const& v, BathParams const& bath)
{
    return maxwellian_radial(norm(v - bath.u0), bath.theta0);
}

double maxwellian_ball_mass(double r, double theta)
{
    double const x = r / std::sqrt(theta);
    return std::erf(x / std::numbers::sqrt2) - std::sqrt(2.0 / std::numbers::pi) * x * std::exp(-0.5 * x * x);
}

double theta_sharp(double e, double theta0)
{
    require_restitution(e, "e");
    if (!(theta0 > 0.0)) {
        throw std::invalid_argument("theta0 must be positive");
    }
    return (1.0 + e) / (3.0 - e) * theta0;
}

double log_weight_radial(double r, WeightParams const& w)
{
    double const br = bracket(r);
    return w.q * std::log(br) + w.b * std::pow(br, w.beta);
}

double log_weight_m(Vec3 const& v, WeightParams const& w) { return log_weight_radial(norm(v), w); }

double weight_m(Vec3 const& v, WeightParams const& w) { return std::exp(log_weight_m(v, w)); }

} // namespace gbk
