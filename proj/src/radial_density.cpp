#include "gbk/radial_density.hpp"

#include <cmath>
using std::isnan; // boost 1.74 pchip calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gbk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kFine = 8192;

// exp(-x) I0(x)
double bessel_i0_scaled(double x)
{
    if (x < 600.0) {
        return boost::math::cyl_bessel_i(0, x) * std::exp(-x);
    }
    double const ix = 1.0 / x;
    return (1.0 + ix * (1.0 / 8.0 + ix * (9.0 / 128.0 + ix * 225.0 / 3072.0))) / std::sqrt(2.0 * kPi * x);
}

double lerp_table(std::vector<double> const& t, double dr, double r)
{
    double const x = r / dr;
    auto const k = static_cast<std::size_t>(x);
    if (k + 1 >= t.size()) {
        return t.back();
    }
    double const f = x - static_cast<double>(k);
    return t[k] + f * (t[k + 1] - t[k]);
}

} // namespace

RadialDensity RadialDensity::maxwellian(Vec3 const& center, double theta, double mass)
{
    if (!(theta > 0.0) || !(mass > 0.0)) {
        throw std::invalid_argument("Maxwellian density needs theta > 0 and mass > 0");
    }
    RadialDensity d;
    d.gaussian_ = true;
    d.center_ = center;
    d.theta_ = theta;
    d.mass_ = mass;
    d.amp_ = mass * std::pow(2.0 * kPi * theta, -1.5);
    d.r_cut_ = std::sqrt(2.0 * theta * 40.0);
    return d;
}

RadialDensity RadialDensity::from_profile(RadialProfile const& p)
{
    p.validate();
    std::vector<double> x;
    std::vector<double> y;
    x.push_back(0.0);
    double clipped = 0.0;
    auto clip = [&](std::size_t k) {
        double const v = p.density[k];
        if (v < 0.0) {
            clipped += -v * p.shell_volume(k);
            return 0.0;
        }
        return v;
    };
    y.push_back(clip(0));
    for (std::size_t k = 0; k < p.n_bins(); ++k) {
        x.push_back(p.midpoint(k));
        y.push_back(clip(k));
    }
    x.push_back(p.r_max());
    y.push_back(0.0);
    boost::math::interpolators::pchip<std::vector<double>> spline(std::move(x), std::move(y), 0.0);

    RadialDensity d;
    d.gaussian_ = false;
    d.center_ = p.center;
    d.clipped_ = clipped;
    double const rmax = p.r_max();
    d.dr_ = rmax / static_cast<double>(kFine - 1);
    d.f_.resize(kFine);
    double top = 0.0;
    for (std::size_t k = 0; k < kFine; ++k) {
        d.f_[k] = std::max(0.0, spline(d.dr_ * static_cast<double>(k)));
        top = std::max(top, d.f_[k]);
    }
    if (!(top > 0.0)) {
        throw std::invalid_argument("profile density is identically zero");
    }
    std::size_t last = kFine - 1;
    while (last > 1 && d.f_[last] <= 1e-14 * top) {
        --last;
    }
    last = std::min(kFine - 1, last + 1);
    d.f_.resize(last + 1);
    d.r_cut_ = d.dr_ * static_cast<double>(last);
    d.tabulate_integrals();
    d.mass_ = d.m0_.back();
    d.theta_ = d.m2_.back() / (3.0 * d.mass_);
    return d;
}

void RadialDensity::tabulate_integrals()
{
    std::size_t const n = f_.size();
    m0_.assign(n, 0.0);
    m1_.assign(n, 0.0);
    m_1_.assign(n, 0.0);
    m2_.assign(n, 0.0);
    tail_.assign(n, 0.0);
    auto g = [&](std::size_t k, int p) {
        double const r = dr_ * static_cast<double>(k);
        return 4.0 * kPi * std::pow(r, p) * f_[k];
    };
    for (std::size_t k = 1; k < n; ++k) {
        m0_[k] = m0_[k - 1] + 0.5 * dr_ * (g(k - 1, 2) + g(k, 2));
        m1_[k] = m1_[k - 1] + 0.5 * dr_ * (g(k - 1, 3) + g(k, 3));
        m_1_[k] = m_1_[k - 1] + 0.5 * dr_ * (g(k - 1, 1) + g(k, 1));
        m2_[k] = m2_[k - 1] + 0.5 * dr_ * (g(k - 1, 4) + g(k, 4));
    }
    for (std::size_t k = n - 1; k-- > 0;) {
        double const r0 = dr_ * static_cast<double>(k);
        double const r1 = r0 + dr_;
        tail_[k] = tail_[k + 1] + 0.5 * dr_ * 2.0 * kPi * (r0 * f_[k] + r1 * f_[k + 1]);
    }
}

double RadialDensity::operator()(double r) const
{
    if (gaussian_) {
        return amp_ * std::exp(-r * r / (2.0 * theta_));
    }
    if (r >= r_cut_) {
        return 0.0;
    }
    return lerp_table(f_, dr_, r);
}

double RadialDensity::plane_integral(double s) const
{
    s = std::abs(s);
    if (gaussian_) {
        return mass_ / std::sqrt(2.0 * kPi * theta_) * std::exp(-s * s / (2.0 * theta_));
    }
    if (s >= r_cut_) {
        return 0.0;
    }
    return lerp_table(tail_, dr_, s);
}

double RadialDensity::collision_frequency(double d) const
{
    d = std::abs(d);
    if (gaussian_) {
        return mass_ * collision_frequency_nu_radial(d, theta_);
    }
    double const c0 = lerp_table(m0_, dr_, d);
    double const c1 = lerp_table(m1_, dr_, d);
    double const cm1 = lerp_table(m_1_, dr_, d);
    double const c2 = lerp_table(m2_, dr_, d);
    double inner = 0.0;
    if (d > 0.0) {
        inner = d * c0 + c2 / (3.0 * d);
    }
    double const outer = (m1_.back() - c1) + d * d / 3.0 * (m_1_.back() - cm1);
    return 4.0 * kPi * (inner + outer);
}

double RadialDensity::ring_integral(double A, double B) const
{
    B = std::max(0.0, B);
    A = std::max(A, B);
    if (gaussian_) {
        double const x = B / (2.0 * theta_);
        return 2.0 * kPi * amp_ * std::exp(-(A - B) / (2.0 * theta_)) * bessel_i0_scaled(x);
    }
    double const rmin = std::sqrt(A - B);
    if (rmin >= r_cut_) {
        return 0.0;
    }
    if (B == 0.0) {
        return 2.0 * kPi * (*this)(std::sqrt(A));
    }
    auto const n = static_cast<std::size_t>(std::clamp(16.0 + 8.0 * std::sqrt(B / (2.0 * theta_)), 16.0, 512.0));
    double const step = kPi / static_cast<double>(n);
    double acc = 0.5 * ((*this)(std::sqrt(A + B)) + (*this)(rmin));
    for (std::size_t k = 1; k < n; ++k) {
        acc += (*this)(std::sqrt(std::max(0.0, A + B * std::cos(step * static_cast<double>(k)))));
    }
    return 2.0 * step * acc;
}

} // namespace gbk
