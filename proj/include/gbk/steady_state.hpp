#pragma once

#include "gbk/diagnostics.hpp"
#include "gbk/dsmc.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbk {

struct SteadyOptions {
    double record_interval{0.05}; // time between temperature records
    std::size_t window{10};       // records per slope window
    int consecutive{3};           // passing windows needed
    double slope_threshold{2.0};  // in slope standard errors
    double t_average{10.0};
    std::size_t batches{20};
    std::size_t n_bins{68};
    double r_max{0.0}; // 0 means 8.5 sqrt(theta0)
};

struct SteadyStateResult {
    RadialProfile profile;
    double temperature{0.0};
    double temperature_stderr{0.0};
    double temperature_record_std{0.0}; // spread of single records at steady state
    double alpha{1.0};
    double e{1.0};
    double stationarity_score{0.0}; // max |slope| / stderr over the passing windows
    std::size_t n_particles{0};
    double t_burn_in{0.0};
    double t_average{0.0};
    std::vector<double> batch_temperatures;
    std::vector<std::vector<double>> batch_densities;
    std::vector<MomentRecord> series;
    ParticleEnsemble final_state;
};

class StationarityError : public std::runtime_error {
public:
    StationarityError(std::string const& what, std::vector<MomentRecord> series)
        : std::runtime_error(what), series_(std::move(series))
    {
    }
    [[nodiscard]] std::vector<MomentRecord> const& series() const noexcept { return series_; }

private:
    std::vector<MomentRecord> series_;
};

/// Slope of y against t and its standard error from ordinary least squares.
struct SlopeTest {
    double slope{0.0};
    double stderr_slope{0.0};
};
SlopeTest linear_slope(std::vector<double> const& t, std::vector<double> const& y);

SteadyStateResult compute_steady_state(SimConfig const& cfg, SteadyOptions const& opt = {});
SteadyStateResult compute_steady_state(SimConfig const& cfg, ParticleEnsemble initial, SteadyOptions const& opt = {});

struct DistanceEstimate {
    double distance{0.0};
    double stderr_distance{0.0}; // batch jackknife
};
DistanceEstimate steady_distance(SteadyStateResult const& r, BathParams const& bath, WeightParams const& w);

/// Isotropic sample of the radial profile about its center.
ParticleEnsemble sample_profile(RadialProfile const& p, std::size_t n, double rho, Rng& rng);

struct Kick {
    enum class Kind { temperature_scale, shift };
    Kind kind{Kind::temperature_scale};
    double s{1.0};
    Vec3 du{};
};

struct RelaxationOptions {
    double t_run{2.0};
    double record_interval{0.02};
    double noise_factor{5.0};
};

struct RelaxationResult {
    RateFit fit;
    std::vector<std::pair<double, double>> signal; // (t, |observable - steady value|)
    double noise{0.0};
    double steady_value{0.0};
    std::size_t window_points{0};
};

RelaxationResult perturbation_relaxation(SteadyStateResult const& steady, SimConfig const& cfg, Kick const& kick,
                                         RelaxationOptions const& opt = {});

struct SweepOptions {
    SteadyOptions steady{};
    WeightParams weight{};
    bool relax{false};
    Kick kick{};
    RelaxationOptions relax_options{};
    bool warm_start{true};
};

struct SweepRow {
    double alpha{1.0};
    double e{1.0};
    double temperature{0.0};
    double temperature_stderr{0.0};
    double distance{0.0};
    double distance_stderr{0.0};
    double rate{0.0};
    double rate_r2{0.0};
    bool ok{false};
    std::string error;
    std::optional<SteadyStateResult> steady;
};

std::vector<SweepRow> alpha_sweep(std::vector<double> const& alphas, SimConfig const& base,
                                  SweepOptions const& opt = {});

} // namespace gbk
