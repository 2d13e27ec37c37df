#include "gbk/carleman.hpp"
#include "gbk/config.hpp"
#include "gbk/diagnostics.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace gbk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("explicit bath kernel equals the plane-integral gain kernel", "[carleman]")
{
    Rng rng = make_stream(17);
    std::normal_distribution<double> g(0.0, 1.5);
    for (double e : {1.0, 0.7, 0.3}) {
        BathParams const bath{{0.4, -0.1, 0.2}, 0.8};
        auto const M0 = RadialDensity::maxwellian(bath.u0, bath.theta0);
        for (int i = 0; i < 300; ++i) {
            Vec3 const v_star = bath.u0 + Vec3{g(rng), g(rng), g(rng)};
            Vec3 const v = v_star + Vec3{g(rng), g(rng), g(rng)};
            double const explicit_form = kernel_k_e(v, v_star, e, bath);
            double const plane_form = gain_kernel(v_star - bath.u0, v - v_star, 0.5 * (1.0 + e), M0);
            REQUIRE_THAT(explicit_form, WithinRel(plane_form, 1e-11));
        }
    }
}

TEST_CASE("kernel mass equals the collision frequency", "[carleman]")
{
    BathParams const bath{{}, 1.0};
    auto const k = KernelConstants::derived(0.5, 1.0);
    for (double s : {0.0, 0.5, 2.0, 6.0}) {
        Vec3 const v_star{s, 0.0, 0.0};
        REQUIRE_THAT(kernel_mass(v_star, bath, k), WithinRel(collision_frequency_nu(v_star, bath), 1e-10));
    }
}

TEST_CASE("kernel singularity and exponent shift", "[carleman]")
{
    BathParams const bath{{1.0, 0.0, 0.0}, 1.0};
    Vec3 const v{2.0, 1.0, 0.0};
    REQUIRE_THROWS_AS(kernel_k_e(v, v, 0.5, bath), std::invalid_argument);
    Vec3 const w{0.0, 1.0, 0.0};
    // (|v - u0|^2 - |w - u0|^2) / |v - w| = (2 - 2) / 2
    REQUIRE_THAT(kernel_exponent_shift(v, w, bath.u0), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(kernel_exponent_shift(Vec3{3.0, 0.0, 0.0}, Vec3{1.0, 0.0, 0.0}, bath.u0), WithinRel(2.0, 1e-15));
    auto const k = KernelConstants::derived(1.0, 1.0);
    REQUIRE(k.mu == 0.0);
}

TEST_CASE("grid gain mass approximates the kernel mass", "[carleman]")
{
    BathParams const bath{{}, 1.0};
    double const e = 0.5;
    auto const g = make_grid(GridParams{17, 0.0}, e, bath);
    auto const m = assemble_bath_operator(g, e, bath);
    auto const k = KernelConstants::derived(e, 1.0);
    std::size_t const center = g.size() / 2;
    REQUIRE(norm(g.node(center)) == 0.0);
    REQUIRE_THAT(discrete_gain_mass(m, center), WithinRel(kernel_mass(g.node(center), bath, k), 0.02));
}

TEST_CASE("kernel bound report", "[carleman]")
{
    BathParams const bath{{}, 1.0};
    WeightParams const w{1.0, 0.5, 2};
    auto const rep = kernel_bound_check(w, bath, KernelConstants::derived(0.5, 1.0), {0.0, 1.0, 2.0, 4.0, 8.0});
    REQUIRE(rep.samples.size() == 5);
    double kmax = 0.0;
    for (auto const& s : rep.samples) {
        REQUIRE(s.converged);
        REQUIRE(s.ratio > 0.0);
        REQUIRE_THAT(s.ratio, WithinRel(s.h / (1.0 + std::pow(s.speed, 0.5)), 1e-12));
        kmax = std::max(kmax, s.ratio);
    }
    REQUIRE(rep.K == kmax);
    REQUIRE(rep.max_step_growth > 0.0);
    // the fit is a relative change, so scaling the kernel constant leaves it unchanged
    auto const scaled = kernel_bound_check(w, bath, KernelConstants{3.0 * KernelConstants::derived(0.5, 1.0).C,
                                                                    KernelConstants::derived(0.5, 1.0).mu},
                                           {1.0});
    REQUIRE_THAT(scaled.fitted_increase, WithinAbs(rep.fitted_increase, 1e-9));
    REQUIRE_THROWS(kernel_bound_check(w, bath, KernelConstants{}, {1.0}, {0.0, 1.0}));
}
