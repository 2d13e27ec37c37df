#include "gbk/diagnostics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gbk {

namespace {

constexpr double kPi = std::numbers::pi;

double log_sum_exp(std::vector<double> const& logs)
{
    if (logs.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    double const top = *std::max_element(logs.begin(), logs.end());
    long double acc = 0.0L;
    for (double l : logs) {
        acc += std::exp(static_cast<long double>(l - top));
    }
    return top + static_cast<double>(std::log(acc));
}

} // namespace

MomentRecord moments(ParticleEnsemble const& ens, std::vector<WeightParams> const& norms)
{
    ens.validate();
    std::size_t const n = ens.size();
    long double sx = 0, sy = 0, sz = 0, se = 0;
    for (auto const& v : ens.velocities) {
        sx += v.x;
        sy += v.y;
        sz += v.z;
        se += static_cast<long double>(norm2(v));
    }
    auto const nn = static_cast<long double>(n);
    Vec3 const mean{static_cast<double>(sx / nn), static_cast<double>(sy / nn), static_cast<double>(sz / nn)};
    long double sc = 0;
    for (auto const& v : ens.velocities) {
        sc += static_cast<long double>(norm2(v - mean));
    }
    MomentRecord rec;
    rec.mass = ens.particle_weight() * static_cast<double>(n);
    rec.momentum = mean;
    rec.energy = static_cast<double>(se / nn);
    rec.temperature = static_cast<double>(sc / (3.0L * nn));
    for (auto const& w : norms) {
        rec.weighted_norms.push_back({w, weighted_norm_estimate(ens, w)});
    }
    return rec;
}

double log_weighted_norm_estimate(ParticleEnsemble const& ens, WeightParams const& w)
{
    ens.validate();
    std::vector<double> logs;
    logs.reserve(ens.size());
    for (auto const& v : ens.velocities) {
        logs.push_back(log_weight_m(v, w));
    }
    return std::log(ens.particle_weight()) + log_sum_exp(logs);
}

double weighted_norm_estimate(ParticleEnsemble const& ens, WeightParams const& w)
{
    double const l = log_weighted_norm_estimate(ens, w);
    if (l > std::log(std::numeric_limits<double>::max())) {
        return std::numeric_limits<double>::max();
    }
    return std::exp(l);
}

double RadialProfile::shell_volume(std::size_t k) const
{
    double const a = bin_edges[k];
    double const b = bin_edges[k + 1];
    return 4.0 * kPi / 3.0 * (b * b * b - a * a * a);
}

double RadialProfile::temperature() const
{
    long double m = 0, m2 = 0;
    for (std::size_t k = 0; k < n_bins(); ++k) {
        double const a = bin_edges[k];
        double const b = bin_edges[k + 1];
        m += shell_mass(k);
        m2 += density[k] * 4.0 * kPi / 5.0 * (std::pow(b, 5) - std::pow(a, 5));
    }
    return m > 0 ? static_cast<double>(m2 / (3.0L * m)) : 0.0;
}

void RadialProfile::validate() const
{
    if (bin_edges.size() != density.size() + 1 || density.empty()) {
        throw std::invalid_argument("profile bins and densities disagree");
    }
    if (!density_stderr.empty() && density_stderr.size() != density.size()) {
        throw std::invalid_argument("profile stderr length mismatch");
    }
}

std::vector<double> uniform_edges(std::size_t n_bins, double r_max)
{
    if (n_bins < 1 || !(r_max > 0.0)) {
        throw std::invalid_argument("bins need n_bins >= 1 and r_max > 0");
    }
    std::vector<double> edges(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) {
        edges[k] = r_max * static_cast<double>(k) / static_cast<double>(n_bins);
    }
    return edges;
}

RadialProfile radial_profile(ParticleEnsemble const& ens, Vec3 const& center, std::size_t n_bins, double r_max)
{
    ens.validate();
    if (n_bins < 8) {
        throw std::invalid_argument("radial_profile needs at least 8 bins");
    }
    RadialProfile p;
    p.bin_edges = uniform_edges(n_bins, r_max);
    p.center = center;
    std::vector<std::size_t> counts(n_bins, 0);
    std::size_t outside = 0;
    double const inv_h = static_cast<double>(n_bins) / r_max;
    for (auto const& v : ens.velocities) {
        double const r = norm(v - center);
        if (r >= r_max) {
            ++outside;
            continue;
        }
        auto k = static_cast<std::size_t>(r * inv_h);
        counts[std::min(k, n_bins - 1)] += 1;
    }
    double const w = ens.particle_weight();
    p.density.resize(n_bins);
    p.density_stderr.resize(n_bins);
    std::size_t inside = 0;
    for (std::size_t k = 0; k < n_bins; ++k) {
        double const vol = p.shell_volume(k);
        p.density[k] = w * static_cast<double>(counts[k]) / vol;
        double const frac = static_cast<double>(counts[k]) / static_cast<double>(ens.size());
        p.density_stderr[k] = ens.rho * std::sqrt(frac * (1.0 - frac) / static_cast<double>(ens.size())) / vol;
        inside += counts[k];
    }
    p.total_mass = w * static_cast<double>(inside);
    p.outside_mass = w * static_cast<double>(outside);
    p.r_max_warning = static_cast<double>(outside) > 0.01 * static_cast<double>(ens.size());
    return p;
}

RadialProfile profile_from_density(std::function<double(double)> const& f, Vec3 const& center, std::size_t n_bins,
                                   double r_max)
{
    RadialProfile p;
    p.bin_edges = uniform_edges(n_bins, r_max);
    p.center = center;
    p.density.resize(n_bins);
    long double total = 0;
    for (std::size_t k = 0; k < n_bins; ++k) {
        auto integrand = [&](double r) { return 4.0 * kPi * r * r * f(r); };
        double const m = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, p.bin_edges[k], p.bin_edges[k + 1], 10, 1e-13);
        p.density[k] = m / p.shell_volume(k);
        total += m;
    }
    p.total_mass = static_cast<double>(total);
    return p;
}

RadialProfile maxwellian_profile(std::vector<double> const& edges, Vec3 const& center, double theta)
{
    RadialProfile p;
    p.bin_edges = edges;
    p.center = center;
    p.density.resize(edges.size() - 1);
    long double total = 0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double const m = maxwellian_ball_mass(edges[k + 1], theta) - maxwellian_ball_mass(edges[k], theta);
        p.density[k] = m / p.shell_volume(k);
        total += m;
    }
    p.total_mass = static_cast<double>(total);
    p.outside_mass = 1.0 - maxwellian_ball_mass(edges.back(), theta);
    return p;
}

double profile_distance(RadialProfile const& p, RadialProfile const& q, WeightParams const& w)
{
    p.validate();
    q.validate();
    if (p.bin_edges != q.bin_edges) {
        throw std::invalid_argument("profiles must share bin edges");
    }
    long double acc = 0;
    for (std::size_t k = 0; k < p.n_bins(); ++k) {
        double const diff = std::abs(p.density[k] - q.density[k]);
        if (diff == 0.0) {
            continue;
        }
        acc += static_cast<long double>(diff * p.shell_volume(k)) *
               std::exp(static_cast<long double>(log_weight_radial(p.midpoint(k), w)));
    }
    return static_cast<double>(acc);
}

double weighted_distance(RadialProfile const& p, BathParams const& bath, double e, WeightParams const& w)
{
    RadialProfile const ref = maxwellian_profile(p.bin_edges, bath.u0, theta_sharp(e, bath.theta0));
    return profile_distance(p, ref, w);
}

RateFit fit_exponential_rate(std::vector<std::pair<double, double>> const& series, double floor)
{
    std::size_t usable = 0;
    while (usable < series.size() && series[usable].second - floor > 0.0 &&
           std::isfinite(series[usable].second)) {
        ++usable;
    }
    if (usable < 5) {
        throw std::runtime_error("exponential fit needs at least 5 points above the floor");
    }
    long double st = 0, sy = 0;
    for (std::size_t i = 0; i < usable; ++i) {
        st += series[i].first;
        sy += std::log(series[i].second - floor);
    }
    long double const n = static_cast<long double>(usable);
    long double const tm = st / n;
    long double const ym = sy / n;
    long double stt = 0, sty = 0, syy = 0;
    for (std::size_t i = 0; i < usable; ++i) {
        long double const dt = series[i].first - tm;
        long double const dy = std::log(series[i].second - floor) - ym;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (stt == 0) {
        throw std::runtime_error("exponential fit needs distinct times");
    }
    long double const slope = sty / stt;
    RateFit fit;
    fit.rate = static_cast<double>(-slope);
    fit.intercept = static_cast<double>(ym - slope * tm);
    long double const ss_res = syy - slope * sty;
    fit.r_squared = syy > 0 ? std::clamp(static_cast<double>(1.0L - ss_res / syy), 0.0, 1.0) : 1.0;
    fit.t_start = series.front().first;
    fit.t_end = series[usable - 1].first;
    fit.n_points = usable;
    return fit;
}

double collision_frequency_nu_radial(double d, double theta0)
{
    double const s = std::sqrt(theta0);
    double const lam = std::abs(d) / s;
    double core = 0.0;
    if (lam < 1e-3) {
        double const l2 = lam * lam;
        core = std::sqrt(2.0 / kPi) * (2.0 + l2 / 3.0 - l2 * l2 / 60.0);
    } else {
        core = std::sqrt(2.0 / kPi) * std::exp(-0.5 * lam * lam) + (lam + 1.0 / lam) * std::erf(lam / std::numbers::sqrt2);
    }
    return 4.0 * kPi * s * core;
}

double collision_frequency_nu(Vec3 const& v, BathParams const& bath)
{
    return collision_frequency_nu_radial(norm(v - bath.u0), bath.theta0);
}

double collision_frequency_quadrature(double d, double theta0)
{
    using boost::math::quadrature::gauss_kronrod;
    boost::math::quadrature::tanh_sinh<double> ts;
    auto sphere_mean = [&](double r) {
        // (1/2) int_{-1}^{1} |v - w| dc for |w - u0| = r
        auto f = [&](double c) { return std::sqrt(std::max(0.0, d * d + r * r - 2.0 * d * r * c)); };
        return 0.5 * ts.integrate(f, -1.0, 1.0, 1e-14);
    };
    auto radial = [&](double r) { return 4.0 * kPi * r * r * maxwellian_radial(r, theta0) * sphere_mean(r); };
    double const top = std::max(d, 0.0) + 40.0 * std::sqrt(theta0);
    double total = 0.0;
    if (d > 0.0) {
        total += gauss_kronrod<double, 31>::integrate(radial, 0.0, d, 8, 1e-14);
    }
    total += gauss_kronrod<double, 31>::integrate(radial, d, top, 12, 1e-14);
    return 4.0 * kPi * total;
}

NuBounds collision_frequency_bounds(BathParams const& bath, double d_max, std::size_t n_grid)
{
    if (n_grid < 2 || !(d_max > 0.0)) {
        throw std::invalid_argument("bound scan needs n_grid >= 2 and d_max > 0");
    }
    NuBounds out;
    out.d_max = d_max;
    out.n_grid = n_grid;
    out.grid_min = std::numeric_limits<double>::infinity();
    out.grid_max = 0.0;
    for (std::size_t k = 0; k < n_grid; ++k) {
        double const d = d_max * static_cast<double>(k) / static_cast<double>(n_grid - 1);
        double const ratio = collision_frequency_nu_radial(d, bath.theta0) / bracket(d);
        out.grid_min = std::min(out.grid_min, ratio);
        out.grid_max = std::max(out.grid_max, ratio);
    }
    out.nu0 = std::min(out.grid_min, 4.0 * kPi);
    out.nu1 = std::max(out.grid_max, 4.0 * kPi);
    return out;
}

} // namespace gbk
