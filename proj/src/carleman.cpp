#include "gbk/carleman.hpp"

#include "gbk/diagnostics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace gbk {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

// int k_e(v_* + zeta omega, v_*) g(zeta, c) zeta^2 dzeta dOmega with c = omega . a_hat, for g azimuth-free.
template <class G>
double spherical_integral(double a, BathParams const& bath, KernelConstants const& k, G&& g, double tol,
                          double* error_out)
{
    double const c0 = 1.0 / (8.0 * bath.theta0);
    double const slope = 2.0 + k.mu;
    double const sigma = 2.0 * std::sqrt(bath.theta0) / slope;
    double worst = 0.0;
    auto inner = [&](double c) {
        double const peak = std::max(0.0, -2.0 * a * c / slope);
        auto f = [&](double zeta) {
            double const arg = slope * zeta + 2.0 * a * c;
            return zeta * k.C * std::exp(-c0 * arg * arg) * g(zeta, c);
        };
        double err = 0.0;
        double total = 0.0;
        if (peak > 0.0) {
            total += GK::integrate(f, 0.0, peak, 15, tol, &err);
            worst = std::max(worst, err);
        }
        total += GK::integrate(f, peak, peak + 40.0 * sigma, 15, tol, &err);
        worst = std::max(worst, err);
        return total;
    };
    double err = 0.0;
    double const out = 2.0 * std::numbers::pi * GK::integrate(inner, -1.0, 1.0, 15, tol, &err);
    if (error_out != nullptr) {
        *error_out = std::max(worst, err);
    }
    return out;
}

} // namespace

KernelConstants KernelConstants::derived(double e, double theta0)
{
    require_restitution(e, "e");
    if (!(theta0 > 0.0)) {
        throw std::invalid_argument("theta0 must be positive");
    }
    return {16.0 / ((1.0 + e) * (1.0 + e) * std::sqrt(2.0 * std::numbers::pi * theta0)), 2.0 * (1.0 - e) / (1.0 + e)};
}

double kernel_exponent_shift(Vec3 const& v, Vec3 const& v_star, Vec3 const& u0)
{
    double const d = norm(v - v_star);
    if (d == 0.0) {
        throw std::invalid_argument("kernel is singular at v = v_star");
    }
    return (norm2(v - u0) - norm2(v_star - u0)) / d;
}

double kernel_k_e(Vec3 const& v, Vec3 const& v_star, BathParams const& bath, KernelConstants const& k)
{
    double const d = norm(v - v_star);
    double const x = kernel_exponent_shift(v, v_star, bath.u0);
    double const arg = (1.0 + k.mu) * d + x;
    return k.C / d * std::exp(-arg * arg / (8.0 * bath.theta0));
}

double kernel_k_e(Vec3 const& v, Vec3 const& v_star, double e, BathParams const& bath)
{
    return kernel_k_e(v, v_star, bath, KernelConstants::derived(e, bath.theta0));
}

double kernel_mass(Vec3 const& v_star, BathParams const& bath, KernelConstants const& k)
{
    double err = 0.0;
    double const a = norm(v_star - bath.u0);
    double const out = spherical_integral(a, bath, k, [](double, double) { return 1.0; }, 1e-13, &err);
    if (!std::isfinite(out)) {
        throw std::runtime_error("kernel mass quadrature did not converge");
    }
    return out;
}

double discrete_gain_mass(OperatorMatrix const& m, std::size_t j)
{
    auto const jj = static_cast<Eigen::Index>(j);
    double const nu = collision_frequency_nu(m.grid.node(j), m.bath);
    // the diagonal holds -nu plus the singular-kernel self term
    return m.entries.col(jj).sum() + nu;
}

KernelBoundReport kernel_bound_check(WeightParams const& w, BathParams const& bath, KernelConstants const& k,
                                     std::vector<double> const& speeds, std::vector<double> const& trend_speeds)
{
    w.validate();
    bath.validate();
    if (!(w.beta > 0.0 && w.beta < 1.0)) {
        throw std::invalid_argument("kernel bound check needs weight exponent beta in (0, 1)");
    }
    double const u0n = norm(bath.u0);
    KernelBoundReport rep;
    auto eval = [&](double s) {
        KernelBoundSample out;
        out.speed = s;
        double const a = s * std::sqrt(bath.theta0);
        double const p = u0n + a; // v_* = p d, so the integrand is symmetric about d
        double const lw_star = log_weight_radial(std::abs(p), w);
        auto g = [&](double zeta, double c) {
            double const r = std::sqrt(std::max(0.0, p * p + zeta * zeta + 2.0 * zeta * p * c));
            return std::exp(log_weight_radial(r, w) - lw_star);
        };
        double err = 0.0;
        try {
            out.h = spherical_integral(a, bath, k, g, 1e-10, &err);
            if (!std::isfinite(out.h) || err > 1e-6 * std::abs(out.h)) {
                out.converged = false;
                out.error = fmt::format("quadrature error estimate {:.3e}", err);
            }
        } catch (std::exception const& ex) {
            out.converged = false;
            out.error = ex.what();
        }
        out.ratio = out.h / (1.0 + std::pow(std::abs(p), 1.0 - w.beta));
        return out;
    };
    for (double s : speeds) {
        rep.samples.push_back(eval(s));
        if (rep.samples.back().converged) {
            rep.K = std::max(rep.K, rep.samples.back().ratio);
        }
    }
    std::vector<double> xs;
    std::vector<double> ys;
    bool converged = true;
    for (double s : trend_speeds) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("trend speeds must be positive");
        }
        auto const it = std::find_if(rep.samples.begin(), rep.samples.end(), [&](auto const& x) { return x.speed == s; });
        KernelBoundSample const smp = it != rep.samples.end() ? *it : eval(s);
        converged = converged && smp.converged;
        if (!ys.empty()) {
            rep.max_step_growth = std::max(rep.max_step_growth, smp.ratio / ys.back());
        }
        xs.push_back(std::log2(s));
        ys.push_back(smp.ratio);
    }
    if (xs.size() >= 2) {
        double const n = static_cast<double>(xs.size());
        double const mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        double const my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        rep.fitted_increase = sxy / sxx * (xs.back() - xs.front()) / my;
    }
    rep.trend_ok = converged && rep.fitted_increase <= 0.05;
    return rep;
}

} // namespace gbk
