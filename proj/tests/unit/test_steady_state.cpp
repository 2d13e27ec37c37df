#include "gbk/steady_state.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace gbk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig base_config(double alpha, double e, std::size_t n)
{
    SimConfig cfg;
    cfg.n_particles = n;
    cfg.t_end = 60.0;
    cfg.restitution = {alpha, e};
    cfg.seed = 2024;
    cfg.threads = 0;
    return cfg;
}

SteadyOptions quick_options()
{
    SteadyOptions opt;
    opt.t_average = 3.0;
    opt.batches = 10;
    opt.n_bins = 40;
    return opt;
}

} // namespace

TEST_CASE("least-squares slope", "[steady]")
{
    std::vector<double> t{0, 1, 2, 3, 4};
    std::vector<double> y{1, 3, 5, 7, 9};
    auto const s = linear_slope(t, y);
    REQUIRE_THAT(s.slope, WithinRel(2.0, 1e-14));
    REQUIRE_THAT(s.stderr_slope, WithinAbs(0.0, 1e-12));
    y = {1.0, 1.2, 0.9, 1.1, 1.0};
    auto const noisy = linear_slope(t, y);
    // textbook formula: sqrt(SSR / (n - 2) / Stt)
    double const slope = noisy.slope;
    double const icpt = 1.04 - slope * 2.0;
    double ssr = 0.0;
    for (int i = 0; i < 5; ++i) {
        ssr += std::pow(y[i] - icpt - slope * t[i], 2);
    }
    REQUIRE_THAT(noisy.stderr_slope, WithinRel(std::sqrt(ssr / 3.0 / 10.0), 1e-12));
}

TEST_CASE("elastic self collisions with an inelastic bath settle at the bath equilibrium", "[steady]")
{
    auto const r = compute_steady_state(base_config(1.0, 0.5, 20000), quick_options());
    REQUIRE(r.t_burn_in > 0.0);
    REQUIRE(r.stationarity_score < 2.0);
    // (1 + e) / (3 - e) theta0
    REQUIRE(std::abs(r.temperature - 0.6) < 0.01 * 0.6);
    REQUIRE(r.temperature_stderr > 0.0);
    REQUIRE(r.batch_densities.size() == 10);
    auto const d = steady_distance(r, BathParams{}, WeightParams{0.1, 0.5, 1});
    REQUIRE(d.stderr_distance > 0.0);
    REQUIRE(d.distance < 0.1);

    Rng rng = make_stream(8);
    auto const ens = sample_profile(r.profile, 50000, 1.0, rng);
    auto const rec = moments(ens);
    REQUIRE_THAT(rec.temperature, WithinRel(r.profile.temperature(), 0.03));
}

TEST_CASE("missing stationarity raises with the partial series", "[steady]")
{
    SimConfig cfg = base_config(0.9, 0.5, 2000);
    cfg.t_end = 0.2;
    cfg.init_theta = 5.0;
    try {
        (void)compute_steady_state(cfg, quick_options());
        FAIL("expected a stationarity error");
    } catch (StationarityError const& err) {
        REQUIRE_FALSE(err.series().empty());
    }
}

TEST_CASE("perturbation relaxes back towards the steady state", "[steady]")
{
    SimConfig cfg = base_config(1.0, 1.0, 20000);
    auto const steady = compute_steady_state(cfg, quick_options());
    Kick kick;
    kick.s = 1.5;
    auto const rel = perturbation_relaxation(steady, cfg, kick);
    REQUIRE(rel.fit.rate > 0.0);
    REQUIRE(rel.fit.r_squared > 0.9);
    REQUIRE(rel.window_points >= 5);
    Kick bad;
    bad.s = -1.0;
    REQUIRE_THROWS(perturbation_relaxation(steady, cfg, bad));
}

TEST_CASE("steady state properties: uniqueness, idempotence, symmetry, mass closure", "[steady]")
{
    SimConfig cfg = base_config(0.95, 0.5, 20000);
    auto const hot = [&] {
        SimConfig c = cfg;
        c.init_theta = 4.0;
        return compute_steady_state(c, quick_options());
    }();

    ParticleEnsemble cold;
    cold.velocities.assign(cfg.n_particles, Vec3{});
    auto const from_cold = compute_steady_state(cfg, cold, quick_options());
    double const se_pair = std::hypot(hot.temperature_stderr, from_cold.temperature_stderr);
    REQUIRE(std::abs(hot.temperature - from_cold.temperature) < 3.0 * se_pair);

    SimConfig again = cfg;
    again.seed = cfg.seed + 1;
    auto const rerun = compute_steady_state(again, hot.final_state, quick_options());
    double const se_rerun = std::hypot(hot.temperature_stderr, rerun.temperature_stderr);
    REQUIRE(std::abs(hot.temperature - rerun.temperature) < 3.0 * se_rerun);

    auto const& vs = hot.final_state.velocities;
    auto const n = static_cast<double>(vs.size());
    for (int axis = 0; axis < 3; ++axis) {
        double s1 = 0.0;
        double s2 = 0.0;
        for (auto const& v : vs) {
            double const c = v[axis] - cfg.bath.u0[axis];
            s1 += c * c * c;
            s2 += c * c * c * c * c * c;
        }
        double const m3 = s1 / n;
        double const se = std::sqrt((s2 / n - m3 * m3) / n);
        REQUIRE(std::abs(m3) < 4.0 * se);
    }

    REQUIRE_THAT(hot.profile.total_mass + hot.profile.outside_mass, WithinRel(1.0, 1e-9));
}
