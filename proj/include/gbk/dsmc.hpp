#pragma once

#include "gbk/ensemble.hpp"
#include "gbk/kinetics.hpp"
#include "gbk/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gbk {

enum class SpatialMode { homogeneous, periodic_box };

struct SpatialConfig {
    SpatialMode mode{SpatialMode::homogeneous};
    int dim{3};
    double box_length{1.0};
    int n_cells{1}; // per axis
};

struct SimConfig {
    std::size_t n_particles{10000};
    double dt{0.0}; // 0 picks about 0.1 collisions per particle per step
    double t_end{1.0};
    RestitutionParams restitution{};
    BathParams bath{};
    double bath_coupling{1.0};
    double self_coupling{1.0};
    SpatialConfig spatial{};
    std::uint64_t seed{1};
    int record_every{1};
    double rho{1.0};
    double init_theta{1.0};
    Vec3 init_u{};
    std::vector<WeightParams> weighted_norms{};
    int threads{1};

    void validate() const;
};

/// Running majorant of relative speeds for one collision cell.
struct MajorantState {
    double u_max{1.0};
    double remainder{0.0};
    std::size_t overflows{0};
};

/// One accepted self-collision, kept for energy bookkeeping.
struct CollisionEvent {
    double un2{0.0}; // (u.n)^2
    double alpha{1.0};
};

struct LogEntry {
    std::size_t step{0};
    std::string message;
};

/// Initial majorant: 4x the largest pairwise speed in a 1% subsample, floored at floor_speed.
double estimate_majorant(std::vector<Vec3> const& velocities, double floor_speed);

/// Self-collisions of the particles listed in idx, treated as one cell of volume cell_volume.
std::size_t collide_cell(std::vector<Vec3>& velocities, std::vector<std::size_t> const& idx, double alpha,
                         double particle_weight, double cell_volume, double dt, Rng& rng, MajorantState& maj,
                         double coupling = 1.0, std::vector<CollisionEvent>* events = nullptr);

/// Homogeneous self-collision sweep (the whole ensemble as one cell of volume 1).
std::size_t step_self_collisions(ParticleEnsemble& ens, double alpha, double dt, Rng& rng, MajorantState& maj,
                                 double coupling = 1.0, std::vector<CollisionEvent>* events = nullptr);

/// Bath collisions for velocities[begin, end). Only the gas particle changes.
std::size_t collide_with_bath(std::vector<Vec3>& velocities, std::size_t begin, std::size_t end, double e,
                              BathParams const& bath, double dt, Rng& rng, double coupling = 1.0);

std::size_t step_bath_collisions(ParticleEnsemble& ens, double e, BathParams const& bath, double dt, Rng& rng,
                                 double coupling = 1.0);

/// Free streaming on the periodic box. Throws std::logic_error without positions.
void step_transport(ParticleEnsemble& ens, double dt, SpatialConfig const& spatial);

/// Expected collisions per particle per unit time for the current ensemble.
double collision_rate_estimate(ParticleEnsemble const& ens, SimConfig const& cfg);

ParticleEnsemble initial_ensemble(SimConfig const& cfg);

class DsmcEngine {
public:
    explicit DsmcEngine(SimConfig cfg);
    DsmcEngine(SimConfig cfg, ParticleEnsemble initial);

    /// transport, then self-collisions, then bath collisions
    void advance();
    void advance_to(double t);
    MomentRecord record() const;

    [[nodiscard]] ParticleEnsemble const& ensemble() const noexcept { return ens_; }
    [[nodiscard]] ParticleEnsemble& ensemble() noexcept { return ens_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double time() const noexcept { return static_cast<double>(step_) * dt_; }
    [[nodiscard]] std::size_t step_index() const noexcept { return step_; }
    [[nodiscard]] SimConfig const& config() const noexcept { return cfg_; }
    [[nodiscard]] std::vector<LogEntry> const& log() const noexcept { return log_; }
    [[nodiscard]] std::size_t self_collisions() const noexcept { return n_self_; }
    [[nodiscard]] std::size_t bath_collisions() const noexcept { return n_bath_; }

    void keep_events(bool on) { keep_events_ = on; }
    [[nodiscard]] std::vector<CollisionEvent> const& events() const noexcept { return events_; }
    void clear_events() { events_.clear(); }

    /// Recompute majorants from the current velocities.
    void reset_majorants();

private:
    void init();
    void self_step();
    void bath_step();
    int cell_of(Vec3 const& x) const;

    SimConfig cfg_;
    ParticleEnsemble ens_;
    double dt_{0.0};
    std::size_t step_{0};
    int threads_{1};
    std::vector<MajorantState> majorants_;
    std::vector<LogEntry> log_;
    std::vector<CollisionEvent> events_;
    bool keep_events_{false};
    std::size_t n_self_{0};
    std::size_t n_bath_{0};
};

struct RunResult {
    std::vector<MomentRecord> series;
    ParticleEnsemble final_state;
    std::vector<LogEntry> log;
    double dt{0.0};
    std::size_t self_collisions{0};
    std::size_t bath_collisions{0};
};

RunResult run(SimConfig const& cfg);
RunResult run(SimConfig const& cfg, ParticleEnsemble initial);

} // namespace gbk
