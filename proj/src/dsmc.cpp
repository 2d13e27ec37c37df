#include "gbk/dsmc.hpp"

#include "gbk/diagnostics.hpp"
#include "gbk/parallel.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gbk {

namespace {

constexpr std::size_t kBathBlock = 8192;
constexpr std::uint64_t kStreamInit = 0;
constexpr std::uint64_t kStreamBath = 1;
constexpr std::uint64_t kStreamSelf = 2;
constexpr double kFourPi = 4.0 * std::numbers::pi;

// sigma-form update with sigma uniform on the sphere; returns (u.n)^2
double sigma_collide(Vec3& v, Vec3& w, Vec3 const& u, double speed, Vec3 const& sigma, double alpha, bool both)
{
    Vec3 const d = u - sigma * speed;
    Vec3 const dv = d * (0.25 * (1.0 + alpha));
    v -= dv;
    if (both) {
        w += dv;
    }
    return 0.25 * norm2(d);
}

double cell_volume(SpatialConfig const& s)
{
    if (s.mode == SpatialMode::homogeneous) {
        return 1.0;
    }
    return std::pow(s.box_length / s.n_cells, s.dim);
}

double box_volume(SpatialConfig const& s)
{
    return s.mode == SpatialMode::homogeneous ? 1.0 : std::pow(s.box_length, s.dim);
}

double wrap(double x, double length)
{
    double y = x - length * std::floor(x / length);
    if (y >= length) {
        y -= length;
    }
    if (y < 0.0) {
        y = 0.0;
    }
    return y;
}

} // namespace

void ParticleEnsemble::validate() const
{
    if (velocities.size() < 2) {
        throw std::invalid_argument("ensemble needs at least two particles");
    }
    if (!positions.empty() && positions.size() != velocities.size()) {
        throw std::invalid_argument("positions and velocities differ in length");
    }
    if (!(rho > 0.0)) {
        throw std::invalid_argument("rho must be positive");
    }
}

void SimConfig::validate() const
{
    if (n_particles < 2) {
        throw std::invalid_argument("n_particles must be at least 2");
    }
    if (dt < 0.0 || !std::isfinite(dt)) {
        throw std::invalid_argument("dt must be positive (or 0 for automatic)");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("t_end must be nonnegative");
    }
    restitution.validate();
    bath.validate();
    if (!(bath_coupling >= 0.0) || !(self_coupling >= 0.0)) {
        throw std::invalid_argument("couplings must be nonnegative");
    }
    if (spatial.mode == SpatialMode::periodic_box) {
        if (spatial.dim < 1 || spatial.dim > 3) {
            throw std::invalid_argument("spatial dim must be 1, 2 or 3");
        }
        if (!(spatial.box_length > 0.0)) {
            throw std::invalid_argument("box_length must be positive");
        }
    }
    if (spatial.n_cells < 1) {
        throw std::invalid_argument("n_cells must be at least 1");
    }
    if (record_every < 1) {
        throw std::invalid_argument("record_every must be at least 1");
    }
    if (!(rho > 0.0)) {
        throw std::invalid_argument("rho must be positive");
    }
    if (!(init_theta >= 0.0)) {
        throw std::invalid_argument("init_theta must be nonnegative");
    }
    for (auto const& w : weighted_norms) {
        w.validate();
    }
}

double estimate_majorant(std::vector<Vec3> const& velocities, double floor_speed)
{
    std::size_t const n = velocities.size();
    std::size_t const m = std::clamp<std::size_t>(n / 100, std::min<std::size_t>(n, 2), 2000);
    std::size_t const stride = std::max<std::size_t>(1, n / m);
    double best = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            best = std::max(best, norm2(velocities[a * stride] - velocities[b * stride]));
        }
    }
    return std::max(4.0 * std::sqrt(best), floor_speed);
}

std::size_t collide_cell(std::vector<Vec3>& velocities, std::vector<std::size_t> const& idx, double alpha,
                         double particle_weight, double cell_volume, double dt, Rng& rng, MajorantState& maj,
                         double coupling, std::vector<CollisionEvent>* events)
{
    std::size_t const nc = idx.size();
    if (nc < 2 || coupling == 0.0) {
        return 0;
    }
    double const pairs = 0.5 * static_cast<double>(nc) * static_cast<double>(nc - 1);
    double const expected = coupling * pairs * (particle_weight / cell_volume) * kFourPi * maj.u_max * dt + maj.remainder;
    auto const candidates = static_cast<std::size_t>(std::floor(expected));
    maj.remainder = expected - static_cast<double>(candidates);

    std::uniform_int_distribution<std::size_t> pick(0, nc - 1);
    std::uniform_int_distribution<std::size_t> pick_other(0, nc - 2);
    std::size_t accepted = 0;
    for (std::size_t k = 0; k < candidates; ++k) {
        std::size_t const a = pick(rng);
        std::size_t b = pick_other(rng);
        if (b >= a) {
            ++b;
        }
        Vec3& v = velocities[idx[a]];
        Vec3& w = velocities[idx[b]];
        Vec3 const u = v - w;
        double const speed = norm(u);
        double const bound = maj.u_max;
        if (speed > bound) {
            ++maj.overflows;
            while (maj.u_max < speed) {
                maj.u_max *= 1.5;
            }
        }
        if (uniform01(rng) * bound >= speed) {
            continue;
        }
        Vec3 const sigma = uniform_unit_vector(rng);
        double const un2 = sigma_collide(v, w, u, speed, sigma, alpha, true);
        if (events != nullptr) {
            events->push_back({un2, alpha});
        }
        ++accepted;
    }
    return accepted;
}

std::size_t step_self_collisions(ParticleEnsemble& ens, double alpha, double dt, Rng& rng, MajorantState& maj,
                                 double coupling, std::vector<CollisionEvent>* events)
{
    ens.validate();
    require_restitution(alpha, "alpha");
    std::vector<std::size_t> idx(ens.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    return collide_cell(ens.velocities, idx, alpha, ens.particle_weight(), 1.0, dt, rng, maj, coupling, events);
}

std::size_t collide_with_bath(std::vector<Vec3>& velocities, std::size_t begin, std::size_t end, double e,
                              BathParams const& bath, double dt, Rng& rng, double coupling)
{
    if (coupling == 0.0) {
        return 0;
    }
    // Majorant |v - w| <= |v - u0| + |w - u0|; the partner is drawn from the
    // matching mixture of M0 and the speed-biased M0, so no overflow can occur.
    double const sq = std::sqrt(bath.theta0);
    double const mean_speed = std::sqrt(8.0 * bath.theta0 / std::numbers::pi);
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::size_t accepted = 0;
    for (std::size_t i = begin; i < end; ++i) {
        Vec3& v = velocities[i];
        double t = 0.0;
        while (true) {
            double const d = norm(v - bath.u0);
            double const total = coupling * kFourPi * (d + mean_speed);
            t += expo(rng) / total;
            if (t > dt) {
                break;
            }
            Vec3 w;
            if (uniform01(rng) * (d + mean_speed) < d) {
                w = bath.u0 + Vec3{gauss(rng), gauss(rng), gauss(rng)} * sq;
            } else {
                // speed^2 / theta0 is chi-square with 4 degrees of freedom
                double const u1 = 1.0 - uniform01(rng);
                double const u2 = 1.0 - uniform01(rng);
                double const r = sq * std::sqrt(-2.0 * std::log(u1 * u2));
                w = bath.u0 + uniform_unit_vector(rng) * r;
            }
            Vec3 const u = v - w;
            double const speed = norm(u);
            if (uniform01(rng) * (d + norm(w - bath.u0)) >= speed) {
                continue;
            }
            Vec3 const sigma = uniform_unit_vector(rng);
            sigma_collide(v, w, u, speed, sigma, e, false);
            ++accepted;
        }
    }
    return accepted;
}

std::size_t step_bath_collisions(ParticleEnsemble& ens, double e, BathParams const& bath, double dt, Rng& rng,
                                 double coupling)
{
    ens.validate();
    require_restitution(e, "e");
    bath.validate();
    return collide_with_bath(ens.velocities, 0, ens.size(), e, bath, dt, rng, coupling);
}

void step_transport(ParticleEnsemble& ens, double dt, SpatialConfig const& spatial)
{
    if (!ens.has_positions() || spatial.mode != SpatialMode::periodic_box) {
        throw std::logic_error("transport requires a periodic box with positions");
    }
    double const length = spatial.box_length;
    for (std::size_t i = 0; i < ens.size(); ++i) {
        Vec3& x = ens.positions[i];
        Vec3 const& v = ens.velocities[i];
        for (int k = 0; k < spatial.dim; ++k) {
            x[k] = wrap(x[k] + v[k] * dt, length);
        }
    }
}

double collision_rate_estimate(ParticleEnsemble const& ens, SimConfig const& cfg)
{
    std::size_t const n = ens.size();
    std::size_t const m = std::min<std::size_t>(n, 1000);
    std::size_t const stride = std::max<std::size_t>(1, n / m);
    long double pair_sum = 0.0L;
    std::size_t pair_count = 0;
    long double nu_sum = 0.0L;
    for (std::size_t a = 0; a < m; ++a) {
        Vec3 const& va = ens.velocities[a * stride];
        nu_sum += collision_frequency_nu(va, cfg.bath);
        for (std::size_t b = a + 1; b < m; ++b) {
            pair_sum += norm(va - ens.velocities[b * stride]);
            ++pair_count;
        }
    }
    double const mean_pair = pair_count > 0 ? static_cast<double>(pair_sum / pair_count) : 0.0;
    double const density = ens.rho / box_volume(cfg.spatial);
    double const self_rate = cfg.self_coupling * density * kFourPi * mean_pair;
    double const bath_rate = cfg.bath_coupling * static_cast<double>(nu_sum / m);
    return self_rate + bath_rate;
}

ParticleEnsemble initial_ensemble(SimConfig const& cfg)
{
    ParticleEnsemble ens;
    ens.rho = cfg.rho;
    ens.velocities.resize(cfg.n_particles);
    Rng rng = make_stream(cfg.seed, kStreamInit);
    BathParams const init{cfg.init_u, std::max(cfg.init_theta, 0.0)};
    std::normal_distribution<double> gauss(0.0, 1.0);
    double const s = std::sqrt(init.theta0);
    for (auto& v : ens.velocities) {
        double const gx = gauss(rng);
        double const gy = gauss(rng);
        double const gz = gauss(rng);
        v = init.u0 + Vec3{gx, gy, gz} * s;
    }
    if (cfg.spatial.mode == SpatialMode::periodic_box) {
        ens.positions.resize(cfg.n_particles);
        for (auto& x : ens.positions) {
            for (int k = 0; k < cfg.spatial.dim; ++k) {
                x[k] = uniform01(rng) * cfg.spatial.box_length;
            }
        }
    }
    return ens;
}

DsmcEngine::DsmcEngine(SimConfig cfg) : cfg_(std::move(cfg))
{
    cfg_.validate();
    ens_ = initial_ensemble(cfg_);
    init();
}

DsmcEngine::DsmcEngine(SimConfig cfg, ParticleEnsemble initial) : cfg_(std::move(cfg)), ens_(std::move(initial))
{
    cfg_.n_particles = ens_.size();
    cfg_.rho = ens_.rho;
    cfg_.validate();
    ens_.validate();
    bool const boxed = cfg_.spatial.mode == SpatialMode::periodic_box;
    if (boxed && !ens_.has_positions()) {
        throw std::invalid_argument("periodic-box run needs initial positions");
    }
    if (!boxed) {
        ens_.positions.clear();
    }
    init();
}

void DsmcEngine::init()
{
    threads_ = resolve_threads(cfg_.threads);
    double const rate = collision_rate_estimate(ens_, cfg_);
    if (cfg_.dt > 0.0) {
        dt_ = cfg_.dt;
        if (rate * dt_ > 0.5) {
            log_.push_back({0, fmt::format("dt={:.6g} gives {:.3g} expected collisions per particle per step (> 0.5)",
                                           dt_, rate * dt_)});
        }
    } else {
        dt_ = rate > 0.0 ? 0.1 / rate : std::max(cfg_.t_end, 1.0) / 100.0;
    }
    int const cells = cfg_.spatial.mode == SpatialMode::periodic_box
                          ? static_cast<int>(std::pow(cfg_.spatial.n_cells, cfg_.spatial.dim))
                          : 1;
    majorants_.assign(static_cast<std::size_t>(cells), MajorantState{});
    reset_majorants();
}

void DsmcEngine::reset_majorants()
{
    double const u = estimate_majorant(ens_.velocities, std::sqrt(cfg_.bath.theta0));
    for (auto& m : majorants_) {
        m.u_max = u;
    }
}

int DsmcEngine::cell_of(Vec3 const& x) const
{
    int const nc = cfg_.spatial.n_cells;
    double const h = cfg_.spatial.box_length / nc;
    int cell = 0;
    for (int k = cfg_.spatial.dim - 1; k >= 0; --k) {
        int c = static_cast<int>(x[k] / h);
        c = std::clamp(c, 0, nc - 1);
        cell = cell * nc + c;
    }
    return cell;
}

void DsmcEngine::self_step()
{
    if (cfg_.self_coupling == 0.0) {
        return;
    }
    double const alpha = cfg_.restitution.alpha;
    std::vector<CollisionEvent>* ev = keep_events_ ? &events_ : nullptr;
    std::size_t const ncell = majorants_.size();
    std::vector<std::size_t> before(ncell);
    for (std::size_t c = 0; c < ncell; ++c) {
        before[c] = majorants_[c].overflows;
    }
    if (ncell == 1) {
        std::vector<std::size_t> idx(ens_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            idx[i] = i;
        }
        Rng rng = make_stream(cfg_.seed, step_ + 1, kStreamSelf, 0);
        double const vol = cfg_.spatial.mode == SpatialMode::periodic_box ? box_volume(cfg_.spatial) : 1.0;
        n_self_ += collide_cell(ens_.velocities, idx, alpha, ens_.particle_weight(), vol, dt_, rng, majorants_[0],
                                cfg_.self_coupling, ev);
    } else {
        std::vector<std::vector<std::size_t>> members(ncell);
        for (std::size_t i = 0; i < ens_.size(); ++i) {
            members[static_cast<std::size_t>(cell_of(ens_.positions[i]))].push_back(i);
        }
        double const vol = cell_volume(cfg_.spatial);
        std::vector<std::size_t> counts(ncell, 0);
        std::vector<std::vector<CollisionEvent>> cell_events(ev != nullptr ? ncell : 0);
        parallel_for(ncell, threads_, [&](std::size_t b, std::size_t e) {
            for (std::size_t c = b; c < e; ++c) {
                Rng rng = make_stream(cfg_.seed, step_ + 1, kStreamSelf, c);
                counts[c] = collide_cell(ens_.velocities, members[c], alpha, ens_.particle_weight(), vol, dt_, rng,
                                         majorants_[c], cfg_.self_coupling, ev != nullptr ? &cell_events[c] : nullptr);
            }
        });
        for (std::size_t c = 0; c < ncell; ++c) {
            n_self_ += counts[c];
            if (ev != nullptr) {
                ev->insert(ev->end(), cell_events[c].begin(), cell_events[c].end());
            }
        }
    }
    for (std::size_t c = 0; c < ncell; ++c) {
        if (majorants_[c].overflows != before[c]) {
            log_.push_back({step_ + 1, fmt::format("majorant overflow in cell {}: grown to {:.6g}", c,
                                                   majorants_[c].u_max)});
        }
    }
}

void DsmcEngine::bath_step()
{
    if (cfg_.bath_coupling == 0.0) {
        return;
    }
    std::size_t const n = ens_.size();
    std::size_t const blocks = (n + kBathBlock - 1) / kBathBlock;
    std::vector<std::size_t> counts(blocks, 0);
    parallel_for(blocks, threads_, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            Rng rng = make_stream(cfg_.seed, step_ + 1, kStreamBath, b);
            std::size_t const lo = b * kBathBlock;
            std::size_t const hi = std::min(n, lo + kBathBlock);
            counts[b] = collide_with_bath(ens_.velocities, lo, hi, cfg_.restitution.e, cfg_.bath, dt_, rng,
                                          cfg_.bath_coupling);
        }
    });
    for (auto c : counts) {
        n_bath_ += c;
    }
}

void DsmcEngine::advance()
{
    if (cfg_.spatial.mode == SpatialMode::periodic_box) {
        step_transport(ens_, dt_, cfg_.spatial);
    }
    self_step();
    bath_step();
    ++step_;
}

void DsmcEngine::advance_to(double t)
{
    while (time() < t - 1e-12 * std::max(1.0, std::abs(t))) {
        advance();
    }
}

MomentRecord DsmcEngine::record() const
{
    MomentRecord rec = moments(ens_, cfg_.weighted_norms);
    rec.t = time();
    return rec;
}

RunResult run(SimConfig const& cfg) { return run(cfg, initial_ensemble(cfg)); }

RunResult run(SimConfig const& cfg, ParticleEnsemble initial)
{
    DsmcEngine engine(cfg, std::move(initial));
    RunResult out;
    out.dt = engine.dt();
    auto const steps = static_cast<std::size_t>(std::ceil(cfg.t_end / engine.dt() - 1e-9));
    out.series.push_back(engine.record());
    for (std::size_t s = 1; s <= steps; ++s) {
        engine.advance();
        if (s % static_cast<std::size_t>(cfg.record_every) == 0 || s == steps) {
            out.series.push_back(engine.record());
        }
    }
    out.final_state = engine.ensemble();
    out.log = engine.log();
    out.self_collisions = engine.self_collisions();
    out.bath_collisions = engine.bath_collisions();
    return out;
}

} // namespace gbk
