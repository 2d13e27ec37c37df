#include "gbk/diagnostics.hpp"
#include "gbk/dsmc.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace gbk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig self_only(double alpha, std::size_t n, double t_end)
{
    SimConfig cfg;
    cfg.n_particles = n;
    cfg.t_end = t_end;
    cfg.restitution = {alpha, 1.0};
    cfg.bath_coupling = 0.0;
    cfg.init_u = {0.4, -0.3, 0.2};
    cfg.seed = 99;
    return cfg;
}

double sum_squares(std::vector<Vec3> const& vs)
{
    long double s = 0;
    for (auto const& v : vs) {
        s += norm2(v);
    }
    return static_cast<double>(s);
}

} // namespace

TEST_CASE("self collisions conserve momentum to round-off", "[dsmc]")
{
    auto const res = run(self_only(0.7, 4000, 2.0));
    Vec3 const p0 = res.series.front().momentum;
    for (auto const& rec : res.series) {
        REQUIRE(norm(rec.momentum - p0) < 1e-12);
        REQUIRE(rec.mass == res.series.front().mass);
    }
    REQUIRE(res.self_collisions > 0);
    REQUIRE(res.bath_collisions == 0);
}

TEST_CASE("self collision energy loss equals the sum of per-collision losses", "[dsmc]")
{
    SimConfig const cfg = self_only(0.6, 3000, 0.0);
    DsmcEngine eng(cfg);
    eng.keep_events(true);
    double const before = sum_squares(eng.ensemble().velocities);
    for (int s = 0; s < 50; ++s) {
        eng.advance();
    }
    double const after = sum_squares(eng.ensemble().velocities);
    long double predicted = 0;
    for (auto const& ev : eng.events()) {
        predicted += -0.5L * (1.0L - ev.alpha * ev.alpha) * ev.un2;
    }
    REQUIRE(!eng.events().empty());
    REQUIRE_THAT(after - before, WithinRel(static_cast<double>(predicted), 1e-9));
}

TEST_CASE("elastic self collisions conserve energy", "[dsmc]")
{
    auto const res = run(self_only(1.0, 3000, 1.0));
    double const e0 = res.series.front().energy;
    for (auto const& rec : res.series) {
        REQUIRE_THAT(rec.energy, WithinRel(e0, 1e-12));
    }
}

TEST_CASE("homogeneous cooling follows the hard-sphere cooling law", "[dsmc]")
{
    // Kernel 4 pi |u| per pair with uniform scattering direction: each collision removes
    // (1 - alpha^2) |u|^2 / 4 on average, and <|u|^3> = 32 T^{3/2} / sqrt(pi) for a Maxwellian.
    // dT/dt = -(16 sqrt(pi) / 3) rho (1 - alpha^2) T^{3/2}, so T = T0 / (1 + t / t0)^2.
    double const alpha = 0.9;
    SimConfig cfg = self_only(alpha, 40000, 1.0);
    cfg.init_u = {};
    auto const res = run(cfg);
    double const inv_t0 = (8.0 * std::sqrt(std::numbers::pi) / 3.0) * (1.0 - alpha * alpha);
    auto const& last = res.series.back();
    double const expected = 1.0 / std::pow(1.0 + last.t * inv_t0, 2.0);
    REQUIRE_THAT(last.temperature, WithinRel(expected, 0.03));
}

TEST_CASE("bath-only relaxation reaches the bath equilibrium temperature", "[dsmc]")
{
    SimConfig cfg;
    cfg.n_particles = 20000;
    cfg.t_end = 3.0;
    cfg.self_coupling = 0.0;
    cfg.restitution = {1.0, 0.5};
    cfg.init_theta = 2.0;
    cfg.seed = 5;
    auto const res = run(cfg);
    // (1 + e) / (3 - e) theta0
    REQUIRE_THAT(res.series.back().temperature, WithinRel(0.6, 0.03));
    REQUIRE(norm(res.series.back().momentum) < 5.0 * std::sqrt(0.6 / 20000.0) * std::sqrt(3.0));
}

TEST_CASE("bath collision count matches the collision frequency", "[dsmc]")
{
    BathParams const bath{{0.5, 0.0, 0.0}, 1.0};
    std::vector<Vec3> vs(50000, Vec3{1.5, 0.0, 0.0});
    Rng rng = make_stream(3);
    // short step, so post-collision rate changes are second order
    double const dt = 0.001;
    std::size_t const hits = collide_with_bath(vs, 0, vs.size(), 0.8, bath, dt, rng);
    double const expected = collision_frequency_nu_radial(1.0, 1.0) * dt * static_cast<double>(vs.size());
    REQUIRE(std::abs(static_cast<double>(hits) - expected) < 5.0 * std::sqrt(expected));
}

TEST_CASE("runs are reproducible and independent of the thread count", "[dsmc]")
{
    SimConfig cfg;
    cfg.n_particles = 5000;
    cfg.t_end = 0.5;
    cfg.restitution = {0.8, 0.5};
    cfg.seed = 42;
    cfg.threads = 1;
    auto const a = run(cfg);
    auto const b = run(cfg);
    cfg.threads = 4;
    auto const c = run(cfg);
    REQUIRE(a.final_state.velocities == b.final_state.velocities);
    REQUIRE(a.final_state.velocities == c.final_state.velocities);
    cfg.seed = 43;
    auto const d = run(cfg);
    REQUIRE(a.final_state.velocities != d.final_state.velocities);
}

TEST_CASE("periodic box transport keeps particles inside the box", "[dsmc]")
{
    SimConfig cfg;
    cfg.n_particles = 2000;
    cfg.t_end = 0.5;
    cfg.spatial = {SpatialMode::periodic_box, 3, 2.0, 2};
    cfg.restitution = {0.9, 0.9};
    auto const res = run(cfg);
    REQUIRE(res.final_state.has_positions());
    for (auto const& x : res.final_state.positions) {
        for (int k = 0; k < 3; ++k) {
            REQUIRE(x[k] >= 0.0);
            REQUIRE(x[k] < 2.0);
        }
    }
    ParticleEnsemble bare;
    bare.velocities = {{1, 0, 0}, {0, 1, 0}};
    REQUIRE_THROWS_AS(step_transport(bare, 0.1, cfg.spatial), std::logic_error);
}

TEST_CASE("invalid configurations are rejected", "[dsmc]")
{
    SimConfig cfg;
    cfg.n_particles = 1;
    REQUIRE_THROWS(cfg.validate());
    cfg.n_particles = 10;
    cfg.restitution.alpha = 0.0;
    REQUIRE_THROWS(cfg.validate());
    cfg.restitution.alpha = 1.0;
    cfg.bath.theta0 = -1.0;
    REQUIRE_THROWS(cfg.validate());
    cfg.bath.theta0 = 1.0;
    cfg.dt = -0.1;
    REQUIRE_THROWS(cfg.validate());
}
