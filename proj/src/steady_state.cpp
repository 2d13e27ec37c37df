#include "gbk/steady_state.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gbk {

namespace {

double mean_of(std::vector<double> const& x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double std_of(std::vector<double> const& x)
{
    if (x.size() < 2) {
        return 0.0;
    }
    double const m = mean_of(x);
    double acc = 0.0;
    for (double v : x) {
        acc += (v - m) * (v - m);
    }
    return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

std::size_t steps_per(double interval, double dt)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / dt)));
}

} // namespace

SlopeTest linear_slope(std::vector<double> const& t, std::vector<double> const& y)
{
    std::size_t const n = t.size();
    if (n < 3 || y.size() != n) {
        throw std::invalid_argument("slope test needs at least 3 paired points");
    }
    double const tm = mean_of(t);
    double const ym = mean_of(y);
    double stt = 0, sty = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    SlopeTest out;
    out.slope = sty / stt;
    double const ss_res = std::max(0.0, syy - out.slope * sty);
    out.stderr_slope = std::sqrt(ss_res / static_cast<double>(n - 2) / stt);
    return out;
}

SteadyStateResult compute_steady_state(SimConfig const& cfg, SteadyOptions const& opt)
{
    return compute_steady_state(cfg, initial_ensemble(cfg), opt);
}

SteadyStateResult compute_steady_state(SimConfig const& cfg, ParticleEnsemble initial, SteadyOptions const& opt)
{
    if (cfg.spatial.mode != SpatialMode::homogeneous) {
        throw std::invalid_argument("steady states are computed in homogeneous mode");
    }
    if (opt.window < 3 || opt.consecutive < 1 || opt.batches < 2 || !(opt.t_average > 0.0)) {
        throw std::invalid_argument("invalid steady-state options");
    }
    DsmcEngine engine(cfg, std::move(initial));
    std::size_t const stride = steps_per(opt.record_interval, engine.dt());
    double const r_max = opt.r_max > 0.0 ? opt.r_max : 8.5 * std::sqrt(cfg.bath.theta0);

    SteadyStateResult out;
    out.alpha = cfg.restitution.alpha;
    out.e = cfg.restitution.e;
    out.n_particles = engine.ensemble().size();
    out.series.push_back(engine.record());

    // burn-in: consecutive windows of records with an insignificant temperature slope
    std::vector<double> wt, wy;
    int passes = 0;
    double score = 0.0;
    while (passes < opt.consecutive) {
        if (engine.time() >= cfg.t_end) {
            throw StationarityError(
                fmt::format("no stationarity before t_end={} (alpha={}, e={})", cfg.t_end, out.alpha, out.e),
                out.series);
        }
        for (std::size_t s = 0; s < stride; ++s) {
            engine.advance();
        }
        MomentRecord const rec = engine.record();
        out.series.push_back(rec);
        wt.push_back(rec.t);
        wy.push_back(rec.temperature);
        if (wt.size() == opt.window) {
            SlopeTest const st = linear_slope(wt, wy);
            double const z = st.stderr_slope > 0.0 ? std::abs(st.slope) / st.stderr_slope
                                                   : (st.slope == 0.0 ? 0.0 : INFINITY);
            if (z < opt.slope_threshold) {
                ++passes;
                score = std::max(score, z);
            } else {
                passes = 0;
                score = 0.0;
            }
            wt.clear();
            wy.clear();
        }
    }
    out.t_burn_in = engine.time();
    out.stationarity_score = score;

    // averaging
    auto const n_records = static_cast<std::size_t>(std::ceil(opt.t_average / (static_cast<double>(stride) * engine.dt())));
    std::size_t const records = std::max(n_records, opt.batches);
    std::vector<double> edges = uniform_edges(opt.n_bins, r_max);
    std::vector<std::vector<double>> batch_sum(opt.batches, std::vector<double>(opt.n_bins, 0.0));
    std::vector<std::size_t> batch_count(opt.batches, 0);
    std::vector<double> batch_temp(opt.batches, 0.0);
    std::vector<double> temps;
    double outside = 0.0;
    for (std::size_t r = 0; r < records; ++r) {
        for (std::size_t s = 0; s < stride; ++s) {
            engine.advance();
        }
        MomentRecord const rec = engine.record();
        out.series.push_back(rec);
        temps.push_back(rec.temperature);
        std::size_t const b = r * opt.batches / records;
        RadialProfile const snap = radial_profile(engine.ensemble(), cfg.bath.u0, opt.n_bins, r_max);
        for (std::size_t k = 0; k < opt.n_bins; ++k) {
            batch_sum[b][k] += snap.density[k];
        }
        batch_temp[b] += rec.temperature;
        ++batch_count[b];
        outside += snap.outside_mass;
    }
    out.t_average = engine.time() - out.t_burn_in;

    RadialProfile prof;
    prof.bin_edges = edges;
    prof.center = cfg.bath.u0;
    prof.density.assign(opt.n_bins, 0.0);
    prof.density_stderr.assign(opt.n_bins, 0.0);
    for (std::size_t b = 0; b < opt.batches; ++b) {
        for (auto& d : batch_sum[b]) {
            d /= static_cast<double>(batch_count[b]);
        }
        batch_temp[b] /= static_cast<double>(batch_count[b]);
    }
    for (std::size_t k = 0; k < opt.n_bins; ++k) {
        std::vector<double> col(opt.batches);
        for (std::size_t b = 0; b < opt.batches; ++b) {
            col[b] = batch_sum[b][k];
        }
        prof.density[k] = mean_of(col);
        prof.density_stderr[k] = std_of(col) / std::sqrt(static_cast<double>(opt.batches));
    }
    prof.outside_mass = outside / static_cast<double>(records);
    prof.total_mass = engine.ensemble().rho - prof.outside_mass;
    prof.r_max_warning = prof.outside_mass > 0.01 * engine.ensemble().rho;
    // renormalize so that shell masses close exactly on the captured mass
    long double shells = 0;
    for (std::size_t k = 0; k < opt.n_bins; ++k) {
        shells += prof.shell_mass(k);
    }
    if (shells > 0) {
        double const fix = prof.total_mass / static_cast<double>(shells);
        for (std::size_t k = 0; k < opt.n_bins; ++k) {
            prof.density[k] *= fix;
            prof.density_stderr[k] *= fix;
        }
        for (auto& row : batch_sum) {
            for (auto& d : row) {
                d *= fix;
            }
        }
    }
    out.profile = std::move(prof);
    out.batch_densities = std::move(batch_sum);
    out.batch_temperatures = batch_temp;
    out.temperature = mean_of(temps);
    out.temperature_stderr = std_of(batch_temp) / std::sqrt(static_cast<double>(opt.batches));
    out.temperature_record_std = std_of(temps);
    out.final_state = engine.ensemble();
    return out;
}

DistanceEstimate steady_distance(SteadyStateResult const& r, BathParams const& bath, WeightParams const& w)
{
    DistanceEstimate out;
    out.distance = weighted_distance(r.profile, bath, r.e, w);
    std::size_t const nb = r.batch_densities.size();
    if (nb < 2) {
        return out;
    }
    RadialProfile loo = r.profile;
    std::vector<double> d(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t k = 0; k < loo.n_bins(); ++k) {
            double sum = 0.0;
            for (std::size_t c = 0; c < nb; ++c) {
                if (c != b) {
                    sum += r.batch_densities[c][k];
                }
            }
            loo.density[k] = sum / static_cast<double>(nb - 1);
        }
        d[b] = weighted_distance(loo, bath, r.e, w);
    }
    double const m = mean_of(d);
    double acc = 0.0;
    for (double x : d) {
        acc += (x - m) * (x - m);
    }
    out.stderr_distance = std::sqrt(static_cast<double>(nb - 1) / static_cast<double>(nb) * acc);
    return out;
}

ParticleEnsemble sample_profile(RadialProfile const& p, std::size_t n, double rho, Rng& rng)
{
    p.validate();
    std::vector<double> masses(p.n_bins());
    for (std::size_t k = 0; k < p.n_bins(); ++k) {
        masses[k] = std::max(0.0, p.shell_mass(k));
    }
    std::discrete_distribution<std::size_t> pick(masses.begin(), masses.end());
    ParticleEnsemble ens;
    ens.rho = rho;
    ens.velocities.resize(n);
    for (auto& v : ens.velocities) {
        std::size_t const k = pick(rng);
        double const a3 = std::pow(p.bin_edges[k], 3);
        double const b3 = std::pow(p.bin_edges[k + 1], 3);
        double const r = std::cbrt(a3 + uniform01(rng) * (b3 - a3));
        v = p.center + uniform_unit_vector(rng) * r;
    }
    return ens;
}

RelaxationResult perturbation_relaxation(SteadyStateResult const& steady, SimConfig const& cfg, Kick const& kick,
                                         RelaxationOptions const& opt)
{
    Rng rng = make_stream(cfg.seed, 11);
    ParticleEnsemble ens = sample_profile(steady.profile, cfg.n_particles, cfg.rho, rng);
    Vec3 const u0 = cfg.bath.u0;
    if (kick.kind == Kick::Kind::temperature_scale) {
        if (!(kick.s > 0.0)) {
            throw std::invalid_argument("temperature kick needs s > 0");
        }
        double const f = std::sqrt(kick.s);
        for (auto& v : ens.velocities) {
            v = u0 + (v - u0) * f;
        }
    } else {
        for (auto& v : ens.velocities) {
            v += kick.du;
        }
    }
    DsmcEngine engine(cfg, std::move(ens));
    std::size_t const stride = steps_per(opt.record_interval, engine.dt());
    double const n_ratio = static_cast<double>(steady.n_particles) / static_cast<double>(cfg.n_particles);

    RelaxationResult out;
    bool const temp = kick.kind == Kick::Kind::temperature_scale;
    out.steady_value = temp ? steady.temperature : 0.0;
    out.noise = temp ? steady.temperature_record_std * std::sqrt(n_ratio)
                     : std::sqrt(steady.temperature / static_cast<double>(cfg.n_particles));
    auto observe = [&]() {
        MomentRecord const rec = engine.record();
        double const sig = temp ? std::abs(rec.temperature - out.steady_value) : norm(rec.momentum - u0);
        out.signal.emplace_back(rec.t, sig);
    };
    observe();
    while (engine.time() < opt.t_run) {
        for (std::size_t s = 0; s < stride; ++s) {
            engine.advance();
        }
        observe();
    }
    std::vector<std::pair<double, double>> window;
    for (auto const& p : out.signal) {
        if (p.second <= opt.noise_factor * out.noise) {
            break;
        }
        window.push_back(p);
    }
    out.window_points = window.size();
    if (window.size() < 5) {
        throw std::runtime_error(fmt::format(
            "relaxation signal is below {} x MC noise after {} records; use a larger kick or more particles",
            opt.noise_factor, window.size()));
    }
    out.fit = fit_exponential_rate(window, 0.0);
    return out;
}

std::vector<SweepRow> alpha_sweep(std::vector<double> const& alphas, SimConfig const& base, SweepOptions const& opt)
{
    if (!std::is_sorted(alphas.begin(), alphas.end())) {
        throw std::invalid_argument("sweep alphas must be sorted ascending");
    }
    std::vector<SweepRow> rows;
    std::optional<ParticleEnsemble> warm;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        SweepRow row;
        row.alpha = alphas[i];
        row.e = base.restitution.e;
        row.rate = std::nan("");
        row.rate_r2 = std::nan("");
        try {
            SimConfig cfg = base;
            cfg.restitution.alpha = alphas[i];
            cfg.seed = base.seed + i;
            SteadyStateResult res = (opt.warm_start && warm) ? compute_steady_state(cfg, *warm, opt.steady)
                                                             : compute_steady_state(cfg, opt.steady);
            auto const dist = steady_distance(res, cfg.bath, opt.weight);
            row.temperature = res.temperature;
            row.temperature_stderr = res.temperature_stderr;
            row.distance = dist.distance;
            row.distance_stderr = dist.stderr_distance;
            warm = res.final_state;
            if (opt.relax) {
                try {
                    auto const rel = perturbation_relaxation(res, cfg, opt.kick, opt.relax_options);
                    row.rate = rel.fit.rate;
                    row.rate_r2 = rel.fit.r_squared;
                } catch (std::exception const& ex) {
                    row.error = ex.what();
                }
            }
            row.ok = true;
            row.steady = std::move(res);
        } catch (std::exception const& ex) {
            row.ok = false;
            row.error = ex.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace gbk
