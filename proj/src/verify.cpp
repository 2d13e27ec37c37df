#include "gbk/verify.hpp"

#include "gbk/cli.hpp"
#include "gbk/dsmc.hpp"
#include "gbk/parallel.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace gbk {

namespace {

constexpr double kE = 0.5; // bath restitution used by the inelastic criteria
const std::vector<double> kSweepAlphas{0.8, 0.9, 0.95, 0.99};

struct Context {
    VerifyOptions opt;
    int threads{1};
    std::optional<std::vector<SweepRow>> sweep;

    SimConfig base(std::size_t n, double alpha, double e, double t_end, std::uint64_t salt) const
    {
        SimConfig c;
        c.n_particles = n;
        c.restitution = {alpha, e};
        c.t_end = t_end;
        c.seed = opt.seed + salt;
        c.threads = threads;
        return c;
    }

    std::vector<SweepRow> const& sweep_rows()
    {
        if (!sweep) {
            SimConfig c = base(100000, 0.8, kE, 60.0, 400);
            SweepOptions so;
            sweep = alpha_sweep(kSweepAlphas, c, so);
        }
        return *sweep;
    }

    SweepRow const& sweep_row(double alpha)
    {
        for (auto const& r : sweep_rows()) {
            if (r.alpha == alpha) {
                if (!r.ok) {
                    throw std::runtime_error(fmt::format("steady state at alpha={} failed: {}", alpha, r.error));
                }
                return r;
            }
        }
        throw std::logic_error("alpha not in the sweep");
    }

    AssemblyOptions assembly() const
    {
        AssemblyOptions a;
        a.threads = threads;
        return a;
    }
};

double mean(std::vector<double> const& x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Mean and standard error of a correlated series by batch means.
std::pair<double, double> batch_mean(std::vector<double> const& x, std::size_t batches)
{
    std::size_t const len = x.size() / batches;
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b) {
        std::vector<double> part(x.begin() + static_cast<std::ptrdiff_t>(b * len),
                                 x.begin() + static_cast<std::ptrdiff_t>((b + 1) * len));
        means.push_back(mean(part));
    }
    double const m = mean(means);
    double ss = 0.0;
    for (double v : means) {
        ss += (v - m) * (v - m);
    }
    return {m, std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches))};
}

CriterionResult c1_collision_identities(Context& ctx)
{
    CriterionResult r;
    auto const t0 = std::chrono::steady_clock::now();
    Rng rng = make_stream(ctx.opt.seed, 101);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
    std::size_t const trials = 100000;
    double mom = 0.0;
    double rest = 0.0;
    double energy = 0.0;
    double forms = 0.0;
    for (std::size_t k = 0; k < trials; ++k) {
        double const s = std::exp(log_scale(rng));
        Vec3 const v{s * gauss(rng), s * gauss(rng), s * gauss(rng)};
        Vec3 const vs{s * gauss(rng), s * gauss(rng), s * gauss(rng)};
        Vec3 const n = uniform_unit_vector(rng);
        double const alpha = 1.0 - unit(rng);
        double const scale = norm(v) + norm(vs);
        auto const p = post_collision_n(v, vs, n, alpha);
        mom = std::max(mom, norm((p.v + p.v_star) - (v + vs)) / scale);
        rest = std::max(rest, std::abs(dot(p.v - p.v_star, n) + alpha * dot(v - vs, n)) / norm(v - vs));
        double const de = energy_change(v, vs, n, alpha);
        energy = std::max(energy, std::abs(de - energy_change_formula(v, vs, n, alpha)) / (norm2(v) + norm2(vs)));
        Vec3 const uh = (v - vs) / norm(v - vs);
        Vec3 sigma = uh - n * (2.0 * dot(uh, n));
        sigma = sigma / norm(sigma);
        auto const q = post_collision_sigma(v, vs, sigma, alpha);
        forms = std::max(forms, std::max(norm(q.v - p.v), norm(q.v_star - p.v_star)) / scale);
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = mom <= 1e-12 && rest <= 1e-12 && energy <= 1e-12 && forms <= 1e-12 && secs < 5.0;
    r.details = {{"trials", trials},       {"momentum", mom}, {"restitution", rest},
                 {"energy", energy},       {"n_vs_sigma", forms}, {"seconds", secs}};
    r.summary = fmt::format("max rel errors momentum {:.1e}, restitution {:.1e}, energy {:.1e}, forms {:.1e}; {:.2f}s",
                            mom, rest, energy, forms, secs);
    return r;
}

CriterionResult c2_elastic_temperature(Context& ctx)
{
    CriterionResult r;
    SimConfig const c = ctx.base(100000, 1.0, kE, 60.0, 200);
    auto const res = compute_steady_state(c);
    double const target = theta_sharp(kE, c.bath.theta0);
    double const rel = std::abs(res.temperature - target) / target;
    r.passed = rel <= 0.02;
    r.details = {{"temperature", res.temperature}, {"stderr", res.temperature_stderr}, {"target", target},
                 {"relative_error", rel}, {"t_burn_in", res.t_burn_in}, {"profile_temperature", res.profile.temperature()}};
    r.summary = fmt::format("T = {:.5f} +- {:.5f} vs {:.3f} (rel err {:.2e}, limit 2e-2)", res.temperature,
                            res.temperature_stderr, target, rel);
    return r;
}

CriterionResult c3_fixed_point(Context& ctx)
{
    CriterionResult r;
    SimConfig c = ctx.base(100000, 1.0, 1.0, 10.0, 300);
    c.init_theta = c.bath.theta0;
    auto const run_res = run(c);
    std::vector<double> temps;
    for (auto const& m : run_res.series) {
        temps.push_back(m.temperature);
    }
    std::size_t const seg = temps.size() / 5;
    std::vector<double> const first(temps.begin(), temps.begin() + static_cast<std::ptrdiff_t>(seg));
    std::vector<double> const last(temps.end() - static_cast<std::ptrdiff_t>(seg), temps.end());
    auto const [m1, s1] = batch_mean(first, 10);
    auto const [m2, s2] = batch_mean(last, 10);
    double const drift = std::abs(m2 - m1);
    double const se = std::hypot(s1, s2);
    auto const [mall, sall] = batch_mean(temps, 20);
    r.passed = drift < 3.0 * se;
    r.details = {{"records", temps.size()}, {"first_mean", m1}, {"last_mean", m2}, {"drift", drift},
                 {"drift_stderr", se},      {"mean", mall},      {"mean_stderr", sall}};
    r.summary = fmt::format("drift {:.2e} = {:.2f} std errors (limit 3); mean T {:.5f} +- {:.5f}", drift, drift / se,
                            mall, sall);
    return r;
}

CriterionResult c4_sweep(Context& ctx)
{
    CriterionResult r;
    auto const& rows = ctx.sweep_rows();
    bool ok = true;
    Json table = Json::array();
    std::string steps;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto const& row = rows[i];
        table.push_back({{"alpha", row.alpha}, {"distance", row.distance}, {"distance_stderr", row.distance_stderr},
                         {"temperature", row.temperature}, {"ok", row.ok}, {"error", row.error}});
        ok = ok && row.ok;
        if (i > 0) {
            double const drop = rows[i - 1].distance - row.distance;
            double const err = std::hypot(rows[i - 1].distance_stderr, row.distance_stderr);
            ok = ok && drop > err;
            steps += fmt::format("{}{:.1f}", i > 1 ? ", " : "", drop / err);
        }
    }
    r.passed = ok;
    r.details = {{"rows", table}};
    r.summary = fmt::format("distances {:.4f} {:.4f} {:.4f} {:.4f}; drops in combined std errors: {}",
                            rows[0].distance, rows[1].distance, rows[2].distance, rows[3].distance, steps);
    return r;
}

CriterionResult c5_conservation(Context& ctx)
{
    CriterionResult r;
    // bath only: momentum relaxes to u0
    SimConfig a = ctx.base(100000, 1.0, kE, 10.0, 500);
    a.self_coupling = 0.0;
    a.bath.u0 = {1.0, 0.0, 0.0};
    a.init_u = {0.0, 0.0, 0.0};
    a.init_theta = 1.0;
    auto const ra = run(a);
    Vec3 const p0 = ra.series.front().momentum;
    Vec3 const p1 = ra.series.back().momentum;
    double const ts = theta_sharp(kE, a.bath.theta0);
    double const tol = 4.0 * std::sqrt(ts / static_cast<double>(a.n_particles));
    double worst_comp = 0.0;
    for (int k = 0; k < 3; ++k) {
        worst_comp = std::max(worst_comp, std::abs(p1[k] - a.bath.u0[k]));
    }
    bool const relaxes = worst_comp <= tol && norm(p0 - a.bath.u0) > 0.9;

    // self collisions only: momentum conserved
    SimConfig b = ctx.base(100000, 0.9, kE, 1.0, 501);
    b.bath_coupling = 0.0;
    b.init_u = {0.3, -0.2, 0.1};
    auto const rb = run(b);
    double drift = 0.0;
    for (auto const& m : rb.series) {
        drift = std::max(drift, norm(m.momentum - rb.series.front().momentum));
    }
    double const speed = std::sqrt(3.0 * b.init_theta);
    bool const conserves = drift <= 1e-10 * speed && rb.self_collisions > 0;
    r.passed = relaxes && conserves;
    r.details = {{"bath_only", {{"initial_momentum", to_json(p0)}, {"final_momentum", to_json(p1)},
                                {"max_component_error", worst_comp}, {"tolerance", tol}}},
                 {"self_only", {{"max_momentum_drift", drift}, {"tolerance", 1e-10 * speed},
                                {"collisions", rb.self_collisions}}}};
    r.summary = fmt::format("bath-only |p - u0| {:.1e} (tol {:.1e}) from {:.2f}; self-only momentum drift {:.1e}",
                            worst_comp, tol, norm(p0 - a.bath.u0), drift);
    return r;
}

CriterionResult c6_dissipation(Context& ctx)
{
    CriterionResult r;
    SimConfig c = ctx.base(100000, 0.9, kE, 2.0, 600);
    c.bath_coupling = 0.0;
    auto const res = run(c);
    std::size_t rises = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < res.series.size(); ++k) {
        double const d = (res.series[k].energy - res.series[k - 1].energy) / res.series[k - 1].energy;
        worst = std::max(worst, d);
        if (d > 1e-13) {
            ++rises;
        }
    }
    r.passed = rises == 0 && res.series.size() > 2;
    r.details = {{"records", res.series.size()}, {"increases", rises}, {"max_relative_step", worst},
                 {"initial_energy", res.series.front().energy}, {"final_energy", res.series.back().energy}};
    r.summary = fmt::format("{} records, {} increases, largest relative step {:.2e}; E {:.4f} -> {:.4f}",
                            res.series.size(), rises, worst, res.series.front().energy, res.series.back().energy);
    return r;
}

CriterionResult c7_relaxation(Context& ctx)
{
    CriterionResult r;
    auto const& row = ctx.sweep_row(0.95);
    SimConfig const c = ctx.base(100000, 0.95, kE, 60.0, 700);
    Kick kick;
    kick.kind = Kick::Kind::temperature_scale;
    kick.s = 1.2;
    auto const rel = perturbation_relaxation(*row.steady, c, kick);
    r.passed = rel.fit.r_squared > 0.99 && rel.fit.rate > 0.0;
    r.details = {{"fit", to_json(rel.fit)}, {"noise", rel.noise}, {"window_points", rel.window_points},
                 {"steady_temperature", rel.steady_value}};
    r.summary = fmt::format("rate {:.4f}, r^2 {:.5f} over t in [{:.2f}, {:.2f}] ({} points)", rel.fit.rate,
                            rel.fit.r_squared, rel.fit.t_start, rel.fit.t_end, rel.fit.n_points);
    return r;
}

CriterionResult c8_bath_spectrum(Context& ctx)
{
    CriterionResult r;
    BathParams const bath{};
    double const ts = theta_sharp(kE, bath.theta0);
    auto const M = RadialDensity::maxwellian(bath.u0, ts);
    Json grids = Json::array();
    std::map<int, SpectrumReport> reps;
    double defect21 = 0.0;
    double probe21 = 0.0;
    for (int n : {17, 21}) {
        auto const grid = VelocityGrid::make(6.0 * std::sqrt(ts), n, bath.u0, ts);
        auto const m = assemble_bath_operator(grid, kE, bath, ctx.assembly());
        auto const cand = sample_on_grid(grid, M);
        auto rep = spectrum(m, cand, n == 21);
        double const defect = weighted_symmetry_defect(m.entries, cand);
        double const probe = dissipativity_probe(m.entries, cand, 8, ctx.opt.seed + 800);
        if (n == 21) {
            defect21 = defect;
            probe21 = probe;
        }
        grids.push_back({{"n", n}, {"gap", rep.spectral_gap}, {"null_residual", rep.null_residual},
                         {"null_residual_raw", rep.null_residual_raw}, {"mass_residual", rep.mass_residual},
                         {"nearest_zero", rep.nearest_zero.real()}, {"eigenvector_cosine", rep.eigenvector_cosine},
                         {"max_imag", rep.max_imag}, {"symmetry_defect", defect}, {"dissipativity", probe}});
        reps.emplace(n, std::move(rep));
    }
    auto const& a = reps.at(17);
    auto const& b = reps.at(21);
    double const shrink = a.null_residual / b.null_residual;
    double const gap_change = std::abs(b.spectral_gap - a.spectral_gap) / a.spectral_gap;
    bool const ok = b.eigenvector_cosine >= 0.999 && b.null_residual <= 5e-3 && shrink >= 2.0 && b.spectral_gap > 0.0 &&
                    a.spectral_gap > 0.0 && gap_change <= 0.10 && defect21 <= b.null_residual;
    r.passed = ok;
    r.details = {{"grids", grids}, {"residual_shrink", shrink}, {"gap_change", gap_change}};
    r.summary = fmt::format(
        "n=21 cosine {:.6f}, null residual {:.2e} (x{:.2f} smaller than n=17), gap {:.4f} vs {:.4f} ({:.1f}% change), "
        "symmetry defect {:.1e}, <h,Lh> max {:.2e}",
        b.eigenvector_cosine, b.null_residual, shrink, b.spectral_gap, a.spectral_gap, 100.0 * gap_change, defect21,
        probe21);
    return r;
}

RadialProfile leave_one_out(SteadyStateResult const& s, std::size_t skip)
{
    RadialProfile p = s.profile;
    std::size_t const nb = s.batch_densities.size();
    for (std::size_t k = 0; k < p.density.size(); ++k) {
        double acc = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            if (b != skip) {
                acc += s.batch_densities[b][k];
            }
        }
        p.density[k] = acc / static_cast<double>(nb - 1);
    }
    p.density_stderr.clear();
    return p;
}

CriterionResult c9_linearized(Context& ctx)
{
    CriterionResult r;
    BathParams const bath{};
    double const ts = theta_sharp(kE, bath.theta0);
    auto const grid = VelocityGrid::make(6.0 * std::sqrt(ts), 17, bath.u0, ts);
    auto const M = RadialDensity::maxwellian(bath.u0, ts);
    auto const L1 = assemble_linearized(grid, 1.0, kE, bath, M, ctx.assembly());

    Json diffs = Json::array();
    std::vector<double> diff_values;
    std::optional<OperatorMatrix> L95;
    std::optional<RadialDensity> F95;
    for (double alpha : kSweepAlphas) {
        auto const& row = ctx.sweep_row(alpha);
        auto F = RadialDensity::from_profile(row.steady->profile);
        auto La = assemble_linearized(grid, alpha, kE, bath, F, ctx.assembly());
        double const d = max_row_sum(La.entries - L1.entries);
        diff_values.push_back(d);
        diffs.push_back({{"alpha", alpha}, {"norm", d}});
        if (alpha == 0.95) {
            L95 = std::move(La);
            F95 = std::move(F);
        }
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < diff_values.size(); ++i) {
        decreasing = decreasing && diff_values[i] < diff_values[i - 1];
    }

    auto const& steady = *ctx.sweep_row(0.95).steady;
    auto const cand = sample_on_grid(grid, *F95);
    auto const rep = spectrum(*L95, cand, true);
    std::vector<double> jack;
    for (std::size_t b = 0; b < steady.batch_densities.size(); ++b) {
        auto const Fb = RadialDensity::from_profile(leave_one_out(steady, b));
        jack.push_back(null_residual(*L95, sample_on_grid(grid, Fb)).relative);
    }
    double const jm = mean(jack);
    double ss = 0.0;
    for (double x : jack) {
        ss += (x - jm) * (x - jm);
    }
    auto const nb = static_cast<double>(jack.size());
    double const mc_err = std::sqrt((nb - 1.0) / nb * ss);
    bool const residual_ok = rep.null_residual <= 3.0 * mc_err;
    r.passed = residual_ok && rep.spectral_gap > 0.0 && decreasing;
    r.details = {{"null_residual", rep.null_residual}, {"null_residual_raw", rep.null_residual_raw},
                 {"profile_mc_error", mc_err},          {"gap", rep.spectral_gap},
                 {"nearest_zero", rep.nearest_zero.real()}, {"eigenvector_cosine", rep.eigenvector_cosine},
                 {"difference_norms", diffs},           {"grid_n", grid.n}};
    r.summary = fmt::format("null residual {:.2e} vs 3 x MC error {:.2e}; gap {:.4f}; ||L_a - L_1|| {:.3f} {:.3f} "
                            "{:.3f} {:.3f}",
                            rep.null_residual, 3.0 * mc_err, rep.spectral_gap, diff_values[0], diff_values[1],
                            diff_values[2], diff_values[3]);
    return r;
}

CriterionResult c10_split(Context& ctx)
{
    CriterionResult r;
    BathParams const bath{};
    double const ts = theta_sharp(kE, bath.theta0);
    auto const grid = VelocityGrid::make(6.0 * std::sqrt(ts), 13, bath.u0, ts);
    auto const F = RadialDensity::maxwellian(bath.u0, ts);
    SplitParams const sp{0.5, 0.5};
    double const alpha = 0.95;
    auto const s = assemble_split(grid, alpha, kE, bath, sp, F, true, ctx.assembly());
    double const radius = 2.0 / sp.delta;
    double outside = 0.0;
    double ratio_lo = std::numeric_limits<double>::infinity();
    double ratio_hi = 0.0;
    std::size_t outer_rows = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto const ii = static_cast<Eigen::Index>(i);
        Vec3 const v = grid.node(i);
        if (norm(v) > radius) {
            ++outer_rows;
            outside = std::max(outside, s.A.entries.row(ii).cwiseAbs().maxCoeff());
            double const nu = collision_frequency_nu(v, bath) + F.collision_frequency(norm(v - bath.u0));
            double const ratio = s.B.entries(ii, ii) / -nu;
            ratio_lo = std::min(ratio_lo, ratio);
            ratio_hi = std::max(ratio_hi, ratio);
        }
    }
    double const reassembly = (s.A.entries + s.B.entries - s.full.entries).cwiseAbs().maxCoeff();
    auto const empty = assemble_split(grid, alpha, kE, bath, SplitParams{0.9, 0.5}, F, true, ctx.assembly());
    double const a_empty = empty.A.entries.cwiseAbs().maxCoeff();
    // the loss term carries at least 80% of each outer diagonal entry
    bool const dominated = ratio_lo >= 0.8 && ratio_hi <= 1.2;
    r.passed = outer_rows > 0 && outside <= 1e-12 && reassembly <= 1e-12 && dominated && a_empty <= 1e-12;
    r.details = {{"outside_max", outside}, {"outer_rows", outer_rows}, {"reassembly_error", reassembly},
                 {"diag_ratio_min", ratio_lo}, {"diag_ratio_max", ratio_hi}, {"norm_A", max_row_sum(s.A.entries)},
                 {"delta_0_9_max_A", a_empty}};
    r.summary = fmt::format("A outside |v|>{:.0f}: {:.1e}; |A+B-full| {:.1e}; B_ii / -(nu_F+nu_e) in [{:.3f}, {:.3f}] "
                            "on {} rows; A at delta=0.9: {:.1e}",
                            radius, outside, reassembly, ratio_lo, ratio_hi, outer_rows, a_empty);
    return r;
}

CriterionResult c11_collision_frequency(Context& ctx)
{
    CriterionResult r;
    BathParams const bath{};
    double worst = 0.0;
    for (int k = 0; k <= 40; ++k) {
        double const d = 0.5 * k;
        double const a = collision_frequency_nu_radial(d, bath.theta0);
        double const b = collision_frequency_quadrature(d, bath.theta0);
        worst = std::max(worst, std::abs(a - b) / b);
    }
    auto const nb = collision_frequency_bounds(bath, 50.0, 2001);
    Rng rng = make_stream(ctx.opt.seed, 1100);
    std::uniform_real_distribution<double> ud(0.0, 200.0);
    std::size_t outside = 0;
    for (int k = 0; k < 10000; ++k) {
        double const d = k < 100 ? 0.01 * k : ud(rng);
        double const ratio = collision_frequency_nu_radial(d, bath.theta0) / bracket(d);
        if (ratio < nb.nu0 * (1.0 - 1e-12) || ratio > nb.nu1 * (1.0 + 1e-12)) {
            ++outside;
        }
    }
    r.passed = worst <= 1e-8 && nb.nu0 > 0.0 && outside == 0;
    r.details = {{"max_relative_error", worst}, {"nu0", nb.nu0}, {"nu1", nb.nu1}, {"checks_outside", outside}};
    r.summary = fmt::format("closed form vs quadrature {:.1e}; {:.4f} <= nu_e / <v-u0> <= {:.4f}, {} of 10000 off-grid "
                            "checks outside",
                            worst, nb.nu0, nb.nu1, outside);
    return r;
}

CriterionResult c12_inequality_suite(Context& ctx)
{
    CriterionResult r;
    auto const checks = inequality_suite_random(10, 100000, ctx.opt.seed + 1200);
    std::size_t split_viol = 0;
    std::size_t gauss_viol = 0;
    Json arr = Json::array();
    Json first_witness;
    for (auto const& c : checks) {
        arr.push_back(to_json(c));
        if (c.name == "power_split") {
            split_viol += c.violations;
            if (c.violations > 0 && first_witness.is_null()) {
                first_witness = to_json(c);
            }
        } else {
            gauss_viol += c.violations;
        }
    }
    WeightParams w;
    w.b = 1.0;
    w.beta = 0.5;
    w.q = 2.0;
    BathParams const bath{};
    auto const kb = kernel_bound_check(w, bath, KernelConstants::derived(kE, bath.theta0), {0.0, 1.0, 2.0, 4.0, 8.0, 10.0});
    bool const origin_ok = kb.samples.front().converged && kb.samples.front().ratio > 0.0 &&
                           std::isfinite(kb.samples.front().ratio);
    r.passed = split_viol == 0 && gauss_viol == 0 && kb.trend_ok && origin_ok;
    r.details = {{"checks", arr}, {"power_split_violations", split_viol}, {"stretched_gaussian_violations", gauss_viol},
                 {"kernel_bound", to_json(kb)}, {"power_split_witness", first_witness}};
    std::string ratios;
    for (auto const& smp : kb.samples) {
        ratios += fmt::format(" {:.4f}", smp.ratio);
    }
    r.summary = fmt::format("power_split violations {}, stretched_gaussian violations {}; kernel ratio over |v*|"
                            " 0,1,2,4,8,10:{}; fitted change over 1..8 {:+.1f}% (largest step x{:.3f})",
                            split_viol, gauss_viol, ratios, 100.0 * kb.fitted_increase, kb.max_step_growth);
    return r;
}

CriterionResult c13_determinism(Context& ctx)
{
    CriterionResult r;
    std::string const seed = fmt::format("seed={}", ctx.opt.seed + 1300);
    std::vector<std::vector<std::string>> const commands{
        {"simulate", "--set", "n_particles=2000", "--set", "t_end=0.5", "--set", "alpha=0.9", "--set", "e=0.5",
         "--set", "weighted_norms=1:0.1:0.5"},
        {"steady", "--set", "n_particles=2000", "--set", "t_end=30", "--set", "alpha=0.9", "--set", "e=0.5", "--set",
         "t_average=2", "--set", "batches=4"},
        {"sweep", "--set", "n_particles=2000", "--set", "t_end=30", "--set", "alphas=0.9,0.95", "--set", "e=0.5",
         "--set", "t_average=2", "--set", "batches=4"},
        {"relax", "--set", "n_particles=5000", "--set", "t_end=30", "--set", "alpha=0.95", "--set", "e=0.5", "--set",
         "t_average=2", "--set", "batches=4", "--set", "kick_scale=2", "--set", "t_run=0.5"},
        {"spectrum", "--set", "grid_n=9", "--set", "e=0.5"},
        {"split-probe", "--set", "grid_n=9", "--set", "e=0.5", "--set", "delta=0.6"},
        {"freq", "--set", "points=21"},
        {"kernel-check", "--set", "speeds=0,1,2", "--set", "consistency_grid_n=9"},
    };
    bool ok = true;
    Json runs = Json::array();
    for (auto cmd : commands) {
        cmd.insert(cmd.begin() + 1, {"--set", seed, "--set", "threads=1"});
        std::ostringstream out1, err1, out2, err2;
        int const c1 = cli::run(cmd, out1, err1);
        int const c2 = cli::run(cmd, out2, err2);
        bool const same = c1 == 0 && c2 == 0 && strip_header(out1.str()) == strip_header(out2.str());
        ok = ok && same;
        runs.push_back({{"command", cmd[0]}, {"exit_codes", {c1, c2}}, {"identical", same},
                        {"bytes", out1.str().size()}, {"stderr", err1.str()}});
    }
    r.passed = ok;
    r.details = {{"runs", runs}};
    r.summary = fmt::format("{} commands rerun with threads=1: payloads {}", commands.size(),
                            ok ? "byte-identical" : "differ or failed");
    return r;
}

using Runner = CriterionResult (*)(Context&);

struct Entry {
    char const* name;
    Runner run;
};

const Entry kCriteria[kCriterionCount] = {
    {"collision identities", c1_collision_identities},
    {"elastic-limit equilibrium temperature", c2_elastic_temperature},
    {"e=1 fixed point", c3_fixed_point},
    {"steady state approaches M as alpha -> 1", c4_sweep},
    {"conservation asymmetry", c5_conservation},
    {"energy dissipation sign", c6_dissipation},
    {"exponential relaxation", c7_relaxation},
    {"bath operator spectrum", c8_bath_spectrum},
    {"linearized inelastic spectrum", c9_linearized},
    {"splitting probes", c10_split},
    {"collision frequency bounds", c11_collision_frequency},
    {"inequality and kernel suite", c12_inequality_suite},
    {"determinism", c13_determinism},
};

} // namespace

std::string criterion_name(int id)
{
    if (id < 1 || id > kCriterionCount) {
        throw std::out_of_range("criterion id out of range");
    }
    return kCriteria[id - 1].name;
}

std::vector<CriterionResult> run_verification(VerifyOptions const& opt)
{
    Context ctx;
    ctx.opt = opt;
    ctx.threads = resolve_threads(opt.threads);
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) {
        if (!opt.only.empty() && opt.only.count(id) == 0) {
            continue;
        }
        auto const t0 = std::chrono::steady_clock::now();
        CriterionResult res;
        try {
            res = kCriteria[id - 1].run(ctx);
        } catch (std::exception const& ex) {
            res.passed = false;
            res.summary = fmt::format("error: {}", ex.what());
            res.details = {{"error", ex.what()}};
        }
        res.id = id;
        res.name = kCriteria[id - 1].name;
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (opt.on_result) {
            opt.on_result(res);
        }
        out.push_back(std::move(res));
    }
    return out;
}

std::string format_result_line(CriterionResult const& r)
{
    return fmt::format("{} C{} {}: {} [{:.1f}s]", r.passed ? "PASS" : "FAIL", r.id, r.name, r.summary, r.seconds);
}

} // namespace gbk
