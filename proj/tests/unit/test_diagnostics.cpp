#include "gbk/diagnostics.hpp"
#include "gbk/kinetics.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace gbk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ParticleEnsemble maxwellian_ensemble(std::size_t n, BathParams const& bath, std::uint64_t seed)
{
    ParticleEnsemble ens;
    Rng rng = make_stream(seed);
    ens.velocities.resize(n);
    for (auto& v : ens.velocities) {
        v = maxwellian_sample(bath, rng);
    }
    return ens;
}

} // namespace

TEST_CASE("collision frequency closed form agrees with quadrature and sampling", "[diagnostics]")
{
    for (double theta : {0.5, 1.0, 2.3}) {
        for (double d : {0.0, 1e-4, 0.3, 1.0, 2.5, 7.0, 30.0}) {
            REQUIRE_THAT(collision_frequency_nu_radial(d, theta),
                         WithinRel(collision_frequency_quadrature(d, theta), 1e-10));
        }
    }
    // Monte Carlo average of 4 pi |v - w| over bath partners
    BathParams const bath{{0.2, 0.1, -0.3}, 0.9};
    Vec3 const v{1.7, -0.4, 0.6};
    Rng rng = make_stream(21);
    int const n = 400000;
    long double acc = 0;
    long double acc2 = 0;
    for (int i = 0; i < n; ++i) {
        double const x = 4.0 * std::numbers::pi * norm(v - maxwellian_sample(bath, rng));
        acc += x;
        acc2 += x * x;
    }
    double const mean = static_cast<double>(acc / n);
    double const se = std::sqrt(static_cast<double>(acc2 / n) - mean * mean) / std::sqrt(static_cast<double>(n));
    REQUIRE(std::abs(collision_frequency_nu(v, bath) - mean) < 5.0 * se);
}

TEST_CASE("collision frequency at the center and at large speed", "[diagnostics]")
{
    // mean bath speed sqrt(8 theta / pi) at the center, 4 pi |d| asymptotically
    double const theta = 1.7;
    REQUIRE_THAT(collision_frequency_nu_radial(0.0, theta),
                 WithinRel(4.0 * std::numbers::pi * std::sqrt(8.0 * theta / std::numbers::pi), 1e-14));
    REQUIRE_THAT(collision_frequency_nu_radial(1e4, theta) / 1e4, WithinRel(4.0 * std::numbers::pi, 1e-7));
}

TEST_CASE("frequency bounds bracket the ratio beyond the scanned grid", "[diagnostics]")
{
    BathParams const bath{{}, 1.0};
    auto const nb = collision_frequency_bounds(bath, 50.0, 2001);
    REQUIRE(nb.nu0 > 0.0);
    REQUIRE(nb.nu0 <= nb.nu1);
    Rng rng = make_stream(4);
    for (int i = 0; i < 5000; ++i) {
        double const d = std::exp(12.0 * uniform01(rng) - 4.0);
        double const r = collision_frequency_nu_radial(d, 1.0) / bracket(d);
        REQUIRE(r >= nb.nu0 * (1.0 - 1e-12));
        REQUIRE(r <= nb.nu1 * (1.0 + 1e-12));
    }
}

TEST_CASE("moments of a sampled maxwellian", "[diagnostics]")
{
    BathParams const bath{{0.5, 0.0, 0.0}, 1.3};
    auto ens = maxwellian_ensemble(100000, bath, 8);
    ens.rho = 2.0;
    auto const rec = moments(ens);
    REQUIRE_THAT(rec.mass, WithinRel(2.0, 1e-14));
    REQUIRE(norm(rec.momentum - bath.u0) < 0.02);
    REQUIRE_THAT(rec.temperature, WithinRel(1.3, 0.015));
    REQUIRE_THAT(rec.energy, WithinRel(3.0 * 1.3 + 0.25, 0.015));
}

TEST_CASE("weighted norm estimate matches radial quadrature", "[diagnostics]")
{
    BathParams const bath{{}, 1.0};
    WeightParams const w{0.4, 0.5, 2};
    auto const ens = maxwellian_ensemble(200000, bath, 9);
    // trapezoid oracle of int 4 pi r^2 M(r) <r>^q exp(b <r>^beta) dr
    int const n = 40000;
    double const r_max = 14.0;
    long double acc = 0;
    for (int i = 1; i < n; ++i) {
        double const r = r_max * i / n;
        acc += 4.0 * std::numbers::pi * r * r * maxwellian_radial(r, 1.0) * std::exp(log_weight_radial(r, w));
    }
    double const exact = static_cast<double>(acc) * r_max / n;
    REQUIRE_THAT(weighted_norm_estimate(ens, w), WithinRel(exact, 0.01));
    REQUIRE_THAT(log_weighted_norm_estimate(ens, w), WithinAbs(std::log(weighted_norm_estimate(ens, w)), 1e-12));
}

TEST_CASE("sampled radial profile matches exact shell averages", "[diagnostics]")
{
    BathParams const bath{{0.0, 1.0, 0.0}, 0.6};
    auto const ens = maxwellian_ensemble(200000, bath, 10);
    auto const p = radial_profile(ens, bath.u0, 40, 8.5 * std::sqrt(0.6));
    auto const q = maxwellian_profile(p.bin_edges, bath.u0, 0.6);
    REQUIRE_THAT(p.total_mass + p.outside_mass, WithinRel(1.0, 1e-14));
    REQUIRE_FALSE(p.r_max_warning);
    double const n = static_cast<double>(ens.size());
    for (std::size_t k = 0; k < p.n_bins(); ++k) {
        // binomial error of the expected shell count
        double const frac = q.shell_mass(k);
        double const se = std::sqrt(frac * (1.0 - frac) / n) / p.shell_volume(k);
        REQUIRE(std::abs(p.density[k] - q.density[k]) <= 5.0 * se + 1.0 / (n * p.shell_volume(k)));
    }
    REQUIRE_THAT(p.temperature(), WithinRel(0.6, 0.02));
}

TEST_CASE("exact profiles agree between the two constructors", "[diagnostics]")
{
    double const theta = 0.8;
    auto const a = maxwellian_profile(uniform_edges(30, 6.0), {}, theta);
    auto const b = profile_from_density([&](double r) { return maxwellian_radial(r, theta); }, {}, 30, 6.0);
    for (std::size_t k = 0; k < a.n_bins(); ++k) {
        REQUIRE_THAT(a.density[k], WithinAbs(b.density[k], 1e-9 * a.density[0]));
    }
    REQUIRE_THAT(a.total_mass, WithinRel(maxwellian_ball_mass(6.0, theta), 1e-12));
}

TEST_CASE("profile distance is a metric on identical bins", "[diagnostics]")
{
    WeightParams const w{0.2, 0.5, 1};
    auto const edges = uniform_edges(25, 7.0);
    auto const a = maxwellian_profile(edges, {}, 0.6);
    auto const b = maxwellian_profile(edges, {}, 0.8);
    auto const c = maxwellian_profile(edges, {}, 1.0);
    REQUIRE(profile_distance(a, a, w) == 0.0);
    REQUIRE_THAT(profile_distance(a, b, w), WithinRel(profile_distance(b, a, w), 1e-14));
    REQUIRE(profile_distance(a, c, w) <= profile_distance(a, b, w) + profile_distance(b, c, w) + 1e-15);
    REQUIRE(profile_distance(a, c, w) > profile_distance(a, b, w));
    REQUIRE_THAT(weighted_distance(a, BathParams{{}, 1.0}, 0.5, w), WithinAbs(0.0, 1e-15));
    REQUIRE_THROWS(profile_distance(a, maxwellian_profile(uniform_edges(24, 7.0), {}, 0.6), w));
}

TEST_CASE("exponential fit recovers a known rate", "[diagnostics]")
{
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i < 50; ++i) {
        double const t = 0.1 * i;
        s.emplace_back(t, 0.01 + 3.0 * std::exp(-1.7 * t));
    }
    auto const fit = fit_exponential_rate(s, 0.01);
    REQUIRE_THAT(fit.rate, WithinRel(1.7, 1e-10));
    REQUIRE_THAT(fit.r_squared, WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(std::exp(fit.intercept), WithinRel(3.0, 1e-10));
    REQUIRE(fit.n_points == 50);
    s.resize(3);
    REQUIRE_THROWS(fit_exponential_rate(s, 0.01));
}
