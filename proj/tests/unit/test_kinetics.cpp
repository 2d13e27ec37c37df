#include "gbk/kinetics.hpp"
#include "gbk/rng.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace gbk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Vec3 gaussian_vec(Rng& rng, double s = 2.0)
{
    std::normal_distribution<double> g(0.0, s);
    return {g(rng), g(rng), g(rng)};
}

} // namespace

TEST_CASE("n-form collisions conserve momentum and reverse the normal component", "[kinetics]")
{
    Rng rng = make_stream(11);
    for (int k = 0; k < 2000; ++k) {
        Vec3 const v = gaussian_vec(rng);
        Vec3 const w = gaussian_vec(rng);
        Vec3 const n = uniform_unit_vector(rng);
        double const alpha = 0.05 + 0.95 * uniform01(rng);
        auto const out = post_collision_n(v, w, n, alpha);

        Vec3 const dp = (out.v + out.v_star) - (v + w);
        REQUIRE(norm(dp) <= 1e-13 * (1.0 + norm(v) + norm(w)));
        double const un = dot(v - w, n);
        double const un_post = dot(out.v - out.v_star, n);
        REQUIRE_THAT(un_post, WithinAbs(-alpha * un, 1e-12 * (1.0 + std::abs(un))));
        // tangential relative velocity is untouched
        Vec3 const ut = (v - w) - n * un;
        Vec3 const ut_post = (out.v - out.v_star) - n * un_post;
        REQUIRE(norm(ut - ut_post) <= 1e-12 * (1.0 + norm(ut)));
    }
}

TEST_CASE("energy change matches the closed form and is never positive", "[kinetics]")
{
    Rng rng = make_stream(12);
    for (int k = 0; k < 2000; ++k) {
        Vec3 const v = gaussian_vec(rng);
        Vec3 const w = gaussian_vec(rng);
        Vec3 const n = uniform_unit_vector(rng);
        double const alpha = uniform01(rng) * 0.99 + 0.01;
        double const direct = energy_change(v, w, n, alpha);
        double const closed = energy_change_formula(v, w, n, alpha);
        REQUIRE_THAT(direct, WithinAbs(closed, 1e-11 * (1.0 + norm2(v) + norm2(w))));
        REQUIRE(closed <= 0.0);
    }
}

TEST_CASE("elastic collisions are involutions and conserve energy", "[kinetics]")
{
    Rng rng = make_stream(13);
    for (int k = 0; k < 500; ++k) {
        Vec3 const v = gaussian_vec(rng);
        Vec3 const w = gaussian_vec(rng);
        Vec3 const n = uniform_unit_vector(rng);
        auto const once = post_collision_n(v, w, n, 1.0);
        auto const twice = post_collision_n(once.v, once.v_star, n, 1.0);
        REQUIRE(norm(twice.v - v) < 1e-12 * (1.0 + norm(v)));
        REQUIRE(norm(twice.v_star - w) < 1e-12 * (1.0 + norm(w)));
        REQUIRE_THAT(energy_change(v, w, n, 1.0), WithinAbs(0.0, 1e-12 * (norm2(v) + norm2(w))));
    }
}

TEST_CASE("sigma form agrees with the n form under the reflection map", "[kinetics]")
{
    Rng rng = make_stream(14);
    for (int k = 0; k < 1000; ++k) {
        Vec3 const v = gaussian_vec(rng);
        Vec3 const w = gaussian_vec(rng);
        Vec3 const n = uniform_unit_vector(rng);
        double const alpha = 0.2 + 0.8 * uniform01(rng);
        Vec3 const u = v - w;
        Vec3 const uhat = u / norm(u);
        Vec3 const sigma = uhat - n * (2.0 * dot(uhat, n));
        auto const a = post_collision_n(v, w, n, alpha);
        auto const b = post_collision_sigma(v, w, sigma / norm(sigma), alpha);
        REQUIRE(norm(a.v - b.v) < 1e-11 * (1.0 + norm(v)));
        REQUIRE(norm(a.v_star - b.v_star) < 1e-11 * (1.0 + norm(w)));
    }
}

TEST_CASE("inputs are validated", "[kinetics]")
{
    Vec3 const v{1, 0, 0};
    Vec3 const w{0, 1, 0};
    REQUIRE_THROWS_AS(post_collision_n(v, w, Vec3{1, 1, 0}, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(post_collision_n(v, w, Vec3{1, 0, 0}, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(post_collision_n(v, w, Vec3{1, 0, 0}, 1.5), std::invalid_argument);
    REQUIRE_THROWS_AS(post_collision_sigma(v, v, Vec3{1, 0, 0}, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(post_collision_n(Vec3{NAN, 0, 0}, w, Vec3{1, 0, 0}, 0.5), std::invalid_argument);
    REQUIRE_THROWS(theta_sharp(0.0, 1.0));
    REQUIRE_THROWS(WeightParams{0.1, 1.0, 1}.validate());
    REQUIRE_NOTHROW(WeightParams{0.1, 0.5, 2}.validate());
}

TEST_CASE("maxwellian helpers agree with independent quadrature", "[kinetics]")
{
    double const theta = 0.7;
    // radial mass by the trapezoid rule on a fine grid
    double const r_max = 2.3;
    int const n = 200000;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        double const r = r_max * i / n;
        double const f = 4.0 * std::numbers::pi * r * r * maxwellian_radial(r, theta);
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    acc *= r_max / n;
    REQUIRE_THAT(maxwellian_ball_mass(r_max, theta), WithinRel(acc, 1e-9));
    REQUIRE_THAT(maxwellian_ball_mass(60.0, theta), WithinAbs(1.0, 1e-14));

    BathParams bath{{0.3, -0.2, 0.1}, theta};
    REQUIRE_THAT(maxwellian_density(bath.u0, bath), WithinRel(std::pow(2.0 * std::numbers::pi * theta, -1.5), 1e-14));
}

TEST_CASE("elastic-limit temperature", "[kinetics]")
{
    // (1 + e) / (3 - e) theta0
    REQUIRE_THAT(theta_sharp(1.0, 2.0), WithinRel(2.0, 1e-15));
    REQUIRE_THAT(theta_sharp(0.5, 1.0), WithinRel(0.6, 1e-15));
    REQUIRE_THAT(theta_sharp(0.2, 3.0), WithinRel(3.0 * 1.2 / 2.8, 1e-15));
}

TEST_CASE("weight is evaluated in log space", "[kinetics]")
{
    WeightParams const w{0.3, 0.5, 2};
    Vec3 const v{3.0, 4.0, 0.0};
    double const br = std::sqrt(26.0);
    REQUIRE_THAT(log_weight_m(v, w), WithinRel(2.0 * std::log(br) + 0.3 * std::pow(br, 0.5), 1e-14));
    REQUIRE_THAT(weight_m(v, w), WithinRel(br * br * std::exp(0.3 * std::sqrt(br)), 1e-13));
    // stays finite where exp would overflow
    REQUIRE(std::isfinite(log_weight_radial(1e12, WeightParams{5.0, 0.9, 3})));
}

TEST_CASE("maxwellian sampler reproduces moments", "[kinetics]")
{
    Rng rng = make_stream(15);
    BathParams bath{{1.0, 0.0, -0.5}, 0.8};
    int const n = 200000;
    Vec3 mean{};
    double second = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec3 const v = maxwellian_sample(bath, rng);
        mean += v;
        second += norm2(v - bath.u0);
    }
    mean = mean / n;
    double const tol = 5.0 * std::sqrt(bath.theta0 / n);
    REQUIRE(norm(mean - bath.u0) < tol * std::sqrt(3.0));
    REQUIRE_THAT(second / (3.0 * n), WithinRel(bath.theta0, 0.01));
}

TEST_CASE("streams with different ids differ and the same id repeats", "[rng]")
{
    Rng a = make_stream(7, 1, 2);
    Rng b = make_stream(7, 1, 2);
    Rng c = make_stream(7, 1, 3);
    auto const xa = a();
    REQUIRE(xa == b());
    REQUIRE(xa != c());
    for (int i = 0; i < 1000; ++i) {
        double const u = uniform01(a);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}
