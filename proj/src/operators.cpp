#include "gbk/operators.hpp"

#include "gbk/diagnostics.hpp"
#include "gbk/lattice_correction.hpp"
#include "gbk/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace gbk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Offset = std::array<int, 3>;

template <class Fn>
double panel_integrate(Fn&& f, double lo, double hi, std::vector<double> breaks, double max_len)
{
    if (!(hi > lo)) {
        return 0.0;
    }
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::erase_if(breaks, [&](double x) { return !(x >= lo && x <= hi); });
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        double const a = breaks[k];
        double const b = breaks[k + 1];
        auto const pieces = static_cast<int>(std::max(1.0, std::ceil((b - a) / max_len)));
        double const step = (b - a) / pieces;
        for (int p = 0; p < pieces; ++p) {
            total += boost::math::quadrature::gauss<double, 8>::integrate(f, a + p * step, a + (p + 1) * step);
        }
    }
    return total;
}

int dot3(Offset const& a, Offset const& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Offset sub3(Offset const& a, Offset const& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

std::uint64_t pack_key(int a2, int d, int z2)
{
    constexpr std::uint64_t kMask = (1ull << 21) - 1;
    auto const da = static_cast<std::uint64_t>(a2) & kMask;
    auto const dd = static_cast<std::uint64_t>(d + (1 << 20)) & kMask;
    auto const dz = static_cast<std::uint64_t>(z2) & kMask;
    return (da << 42) | (dd << 21) | dz;
}

// Vectors with |a|^2 = h^2 a2, a . z = h^2 d, |z|^2 = h^2 z2.
std::pair<Vec3, Vec3> key_vectors(int a2, int d, int z2, double h)
{
    double const zl = std::sqrt(static_cast<double>(z2));
    double const par = static_cast<double>(d) / zl;
    double const perp = std::sqrt(std::max(0.0, static_cast<double>(a2) - par * par));
    return {Vec3{par * h, perp * h, 0.0}, Vec3{zl * h, 0.0, 0.0}};
}

Offset orbit_key(Offset p)
{
    for (auto& x : p) {
        x = std::abs(x);
    }
    std::sort(p.begin(), p.end());
    return p;
}

struct KernelCache {
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    std::vector<std::uint64_t> keys;
    std::vector<double> values;

    void add(std::uint64_t k)
    {
        auto [it, inserted] = index.try_emplace(k, static_cast<std::uint32_t>(keys.size()));
        if (inserted) {
            keys.push_back(k);
        }
    }
    [[nodiscard]] double at(std::uint64_t k) const { return values[index.at(k)]; }
};

void check_centers(VelocityGrid const& grid, BathParams const& bath, RadialDensity const* F)
{
    if (norm(grid.center - bath.u0) > 1e-12) {
        throw std::invalid_argument("velocity grid must be centered at the bath velocity u0");
    }
    if (F != nullptr && norm(F->center() - bath.u0) > 1e-12) {
        throw std::invalid_argument("partner density must be centered at u0");
    }
}

std::vector<Offset> grid_offsets(VelocityGrid const& grid)
{
    std::vector<Offset> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = grid.offset(i);
    }
    return out;
}

} // namespace

std::string to_string(OperatorKind k)
{
    switch (k) {
    case OperatorKind::bath:
        return "bath";
    case OperatorKind::linearized_elastic:
        return "linearized_elastic";
    case OperatorKind::linearized_inelastic:
        return "linearized_inelastic";
    case OperatorKind::a_part:
        return "a_part";
    case OperatorKind::b_part:
        return "b_part";
    }
    return "unknown";
}

void SplitParams::validate() const
{
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("split delta must lie in (0, 1)");
    }
    if (!(smoothing > 0.0 && smoothing <= 1.0)) {
        throw std::invalid_argument("split smoothing must lie in (0, 1]");
    }
}

double smooth_step(double x)
{
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    double const a = std::exp(-1.0 / x);
    double const b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

Truncation::Truncation(SplitParams const& p)
{
    p.validate();
    double const d = p.delta;
    double const w = p.smoothing;
    r_in_ = 1.0 / d;
    width_r_ = w / d;
    u_lo_ = 2.0 * d;
    width_lo_ = w * d;
    u_hi_ = 1.0 / d;
    width_hi_ = w / d;
    c_in_ = 1.0 - 2.0 * d;
    width_c_ = w * d;
    auto f = [&](double c) { return angle_cut(c); };
    auto br = angle_breaks();
    double total = 0.0;
    br.insert(br.begin(), -1.0);
    br.push_back(1.0);
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        if (br[k + 1] > br[k]) {
            total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, br[k], br[k + 1], 15, 1e-14);
        }
    }
    angular_mass_ = 2.0 * kPi * total;
}

double Truncation::speed_cut(double r) const { return smooth_step((r_in_ + width_r_ - r) / width_r_); }

double Truncation::relative_cut(double u) const
{
    return smooth_step((u - (u_lo_ - width_lo_)) / width_lo_) * smooth_step((u_hi_ + width_hi_ - u) / width_hi_);
}

double Truncation::angle_cut(double c) const { return smooth_step((c_in_ + width_c_ - std::abs(c)) / width_c_); }

std::vector<double> Truncation::relative_breaks() const
{
    std::vector<double> out{u_lo_ - width_lo_, u_lo_, u_hi_, u_hi_ + width_hi_};
    std::erase_if(out, [](double x) { return x < 0.0; });
    return out;
}

std::vector<double> Truncation::angle_breaks() const
{
    std::vector<double> out;
    for (double c : {c_in_, c_in_ + width_c_}) {
        if (c > -1.0 && c < 1.0) {
            out.push_back(c);
            out.push_back(-c);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double gain_kernel(Vec3 const& a_w, Vec3 const& z, double b, RadialDensity const& F)
{
    double const zl = norm(z);
    double const s = dot(a_w, z) / zl + zl / b;
    return 4.0 / (b * b * zl) * F.plane_integral(s);
}

double partner_kernel(Vec3 const& a, Vec3 const& z, double b, RadialDensity const& F, double panel_scale,
                      Truncation const* cut)
{
    double const zl = norm(z);
    double const pre = 4.0 / (b * b * zl);
    double const a2 = norm2(a);
    double const al = std::sqrt(a2);
    double const a_par = dot(a, z) / zl;
    double const a_perp = std::sqrt(std::max(0.0, a2 - a_par * a_par));
    double const inv_gamma = (1.0 - b) / b;
    if (cut == nullptr && inv_gamma == 0.0) {
        return pre * F.plane_integral(a_par);
    }
    double const rc = F.cutoff();
    double lo = std::max(0.0, al - rc);
    double hi = al + rc;
    if (inv_gamma > 0.0) {
        hi = std::min(hi, zl / inv_gamma);
    }
    double const stretch = 1.0 + 2.0 * inv_gamma;
    std::vector<double> breaks;
    if (cut != nullptr) {
        double const us = cut->relative_support_high();
        if (us <= zl) {
            return 0.0;
        }
        hi = std::min(hi, std::sqrt((us * us - zl * zl) / stretch));
        for (double u : cut->relative_breaks()) {
            if (u > zl) {
                breaks.push_back(std::sqrt((u * u - zl * zl) / stretch));
            }
        }
        double const g1 = (1.0 + inv_gamma) * (1.0 + inv_gamma);
        for (double c : cut->angle_breaks()) {
            double const x = 0.5 * (1.0 - c);
            breaks.push_back(zl * std::sqrt(x / (g1 - x * stretch)));
        }
    }
    auto integrand = [&](double t) {
        double const c = inv_gamma > 0.0 ? std::min(1.0, t * inv_gamma / zl) : 0.0;
        double const A = a2 + t * t + 2.0 * t * c * a_par;
        double const B = 2.0 * t * std::sqrt(std::max(0.0, 1.0 - c * c)) * a_perp;
        double val = t * F.ring_integral(A, B);
        if (cut != nullptr && val != 0.0) {
            double const u2 = zl * zl + t * t * stretch;
            double const un = t * (1.0 + inv_gamma);
            val *= cut->relative_cut(std::sqrt(u2)) * cut->angle_cut(1.0 - 2.0 * un * un / u2);
        }
        return val;
    };
    double const len = panel_scale * std::sqrt(F.temperature());
    return pre * panel_integrate(integrand, lo, hi, std::move(breaks), len);
}

double truncated_gain_kernel(Vec3 const& a_w, Vec3 const& z, double b, RadialDensity const& F,
                             Truncation const& cut, double panel_scale)
{
    double const zl = norm(z);
    double const pre = 4.0 / (b * b * zl);
    double const a2 = norm2(a_w);
    double const a_par = dot(a_w, z) / zl;
    double const s = a_par + zl / b;
    double const b_perp = std::sqrt(std::max(0.0, a2 - a_par * a_par));
    double const up = zl / b;
    double const rc = F.cutoff();
    if (std::abs(s) >= rc) {
        return 0.0;
    }
    double const half = std::sqrt(rc * rc - s * s);
    double lo = std::max(0.0, b_perp - half);
    double hi = b_perp + half;
    double const us_hi = cut.relative_support_high();
    if (us_hi <= up) {
        return 0.0;
    }
    hi = std::min(hi, std::sqrt(us_hi * us_hi - up * up));
    double const us_lo = cut.relative_support_low();
    if (us_lo > up) {
        lo = std::max(lo, std::sqrt(us_lo * us_lo - up * up));
    }
    std::vector<double> breaks;
    for (double u : cut.relative_breaks()) {
        if (u > up) {
            breaks.push_back(std::sqrt(u * u - up * up));
        }
    }
    for (double c : cut.angle_breaks()) {
        double const x = 0.5 * (1.0 - c);
        if (x > 0.0) {
            breaks.push_back(up * std::sqrt(std::max(0.0, 1.0 / x - 1.0)));
        }
    }
    auto integrand = [&](double rho) {
        double const u2 = up * up + rho * rho;
        double const w = cut.relative_cut(std::sqrt(u2)) * cut.angle_cut(1.0 - 2.0 * up * up / u2);
        if (w == 0.0) {
            return 0.0;
        }
        return rho * w * F.ring_integral(s * s + b_perp * b_perp + rho * rho, 2.0 * rho * b_perp);
    };
    double const len = panel_scale * std::sqrt(F.temperature());
    return pre * panel_integrate(integrand, lo, hi, std::move(breaks), len);
}

namespace {

struct Assembly {
    VelocityGrid grid;
    double e{1.0};
    double alpha{1.0};
    BathParams bath;
    std::optional<RadialDensity> F;
    AssemblyOptions opt;
};

Eigen::MatrixXd assemble_full(Assembly const& as, double& rate_scale)
{
    VelocityGrid const& grid = as.grid;
    bool const lin = as.F.has_value();
    check_centers(grid, as.bath, lin ? &*as.F : nullptr);
    std::size_t const n = grid.size();
    if (n > 20000) {
        throw std::invalid_argument("grid exceeds the dense assembly guard of 20000 nodes");
    }
    int const threads = resolve_threads(as.opt.threads);
    double const h = grid.h();
    double const h3 = grid.quad_weight();
    double const be = 0.5 * (1.0 + as.e);
    double const ba = 0.5 * (1.0 + as.alpha);
    RadialDensity const M0 = RadialDensity::maxwellian(as.bath.u0, as.bath.theta0, 1.0);
    auto const offs = grid_offsets(grid);

    KernelCache partner;
    if (lin) {
        for (std::size_t i = 0; i < n; ++i) {
            int const a2 = dot3(offs[i], offs[i]);
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) {
                    Offset const d = sub3(offs[i], offs[j]);
                    partner.add(pack_key(a2, dot3(offs[i], d), dot3(d, d)));
                }
            }
        }
        partner.values.resize(partner.keys.size());
        parallel_for(partner.keys.size(), threads, [&](std::size_t b0, std::size_t b1) {
            for (std::size_t k = b0; k < b1; ++k) {
                std::uint64_t const key = partner.keys[k];
                int const a2 = static_cast<int>(key >> 42);
                int const d = static_cast<int>((key >> 21) & ((1u << 21) - 1)) - (1 << 20);
                int const z2 = static_cast<int>(key & ((1u << 21) - 1));
                auto const [a, z] = key_vectors(a2, d, z2, h);
                partner.values[k] = partner_kernel(a, z, ba, *as.F, as.opt.panel_scale);
            }
        });
    }

    // diagonal correction per cubic-symmetry orbit
    std::map<Offset, double> correction;
    if (as.opt.corrected) {
        for (auto const& o : offs) {
            correction.emplace(orbit_key(o), 0.0);
        }
        SingularCorrection const lattice;
        std::vector<Offset> orbit_list;
        for (auto const& kv : correction) {
            orbit_list.push_back(kv.first);
        }
        std::vector<double> vals(orbit_list.size());
        parallel_for(orbit_list.size(), threads, [&](std::size_t b0, std::size_t b1) {
            for (std::size_t k = b0; k < b1; ++k) {
                Offset const& o = orbit_list[k];
                Vec3 const a{o[0] * h, o[1] * h, o[2] * h};
                auto g = [&](double t) {
                    double v = 4.0 / (be * be) * M0.plane_integral(t);
                    if (lin) {
                        v += 2.0 * 4.0 / (ba * ba) * as.F->plane_integral(t);
                    }
                    return v;
                };
                vals[k] = -h * h * lattice.constant(g, a);
            }
        });
        for (std::size_t k = 0; k < orbit_list.size(); ++k) {
            correction[orbit_list[k]] = vals[k];
        }
    }

    Eigen::MatrixXd out(n, n);
    parallel_for(n, threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            Offset const& pi = offs[i];
            Vec3 const ai{pi[0] * h, pi[1] * h, pi[2] * h};
            double const di = norm(ai);
            int const a2 = dot3(pi, pi);
            double const fi = lin ? (*as.F)(di) : 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                Offset const d = sub3(pi, offs[j]);
                Vec3 const z{d[0] * h, d[1] * h, d[2] * h};
                Vec3 const aw = ai - z;
                double k = gain_kernel(aw, z, be, M0);
                if (lin) {
                    k += gain_kernel(aw, z, ba, *as.F);
                    k += partner.at(pack_key(a2, dot3(pi, d), dot3(d, d)));
                    k -= fi * 4.0 * kPi * norm(z);
                }
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h3 * k;
            }
            double diag = -collision_frequency_nu_radial(di, as.bath.theta0);
            if (lin) {
                diag -= as.F->collision_frequency(di);
            }
            if (as.opt.corrected) {
                diag += correction.at(orbit_key(pi));
            }
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag;
        }
    });
    rate_scale = collision_frequency_nu_radial(0.0, as.bath.theta0) + (lin ? as.F->collision_frequency(0.0) : 0.0);
    return out;
}

OperatorKind linear_kind(double alpha) { return alpha == 1.0 ? OperatorKind::linearized_elastic : OperatorKind::linearized_inelastic; }

} // namespace

OperatorMatrix assemble_bath_operator(VelocityGrid const& grid, double e, BathParams const& bath,
                                      AssemblyOptions const& opt)
{
    require_restitution(e, "e");
    bath.validate();
    OperatorMatrix m;
    m.grid = grid;
    m.kind = OperatorKind::bath;
    m.e = e;
    m.bath = bath;
    Assembly as{grid, e, 1.0, bath, std::nullopt, opt};
    m.entries = assemble_full(as, m.rate_scale);
    return m;
}

OperatorMatrix assemble_linearized(VelocityGrid const& grid, double alpha, double e, BathParams const& bath,
                                   RadialDensity const& F, AssemblyOptions const& opt)
{
    require_restitution(alpha, "alpha");
    require_restitution(e, "e");
    bath.validate();
    double const gm = grid_mass(grid, F);
    if (std::abs(gm - F.mass()) > 0.01 * F.mass()) {
        throw std::invalid_argument(
            fmt::format("partner density mass on the grid is {} against {}; enlarge or refine the grid", gm, F.mass()));
    }
    OperatorMatrix m;
    m.grid = grid;
    m.kind = linear_kind(alpha);
    m.alpha = alpha;
    m.e = e;
    m.bath = bath;
    Assembly as{grid, e, alpha, bath, F, opt};
    m.entries = assemble_full(as, m.rate_scale);
    return m;
}

SplitOperators assemble_split(VelocityGrid const& grid, double alpha, double e, BathParams const& bath,
                              SplitParams const& split, std::optional<RadialDensity> const& F_in, bool include_self,
                              AssemblyOptions const& opt)
{
    split.validate();
    Truncation const cut(split);
    if (2.0 / split.delta >= grid.R) {
        throw std::invalid_argument(
            fmt::format("truncation radius 2/delta = {} does not fit inside the grid radius {}", 2.0 / split.delta, grid.R));
    }
    RadialDensity const F = F_in ? *F_in : RadialDensity::maxwellian(bath.u0, theta_sharp(e, bath.theta0));
    SplitOperators out;
    out.full = include_self ? assemble_linearized(grid, alpha, e, bath, F, opt) : assemble_bath_operator(grid, e, bath, opt);

    std::size_t const n = grid.size();
    int const threads = resolve_threads(opt.threads);
    double const h = grid.h();
    double const h3 = grid.quad_weight();
    double const be = 0.5 * (1.0 + e);
    double const ba = 0.5 * (1.0 + alpha);
    RadialDensity const M0 = RadialDensity::maxwellian(bath.u0, bath.theta0, 1.0);
    auto const offs = grid_offsets(grid);
    std::vector<double> row_cut(n);
    for (std::size_t i = 0; i < n; ++i) {
        row_cut[i] = cut.speed_cut(norm(grid.node(i)));
    }

    KernelCache incoming;
    KernelCache outgoing;
    for (std::size_t i = 0; i < n; ++i) {
        if (row_cut[i] == 0.0) {
            continue;
        }
        int const a2 = dot3(offs[i], offs[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            Offset const d = sub3(offs[i], offs[j]);
            int const z2 = dot3(d, d);
            incoming.add(pack_key(dot3(offs[j], offs[j]), dot3(offs[j], d), z2));
            if (include_self) {
                outgoing.add(pack_key(a2, dot3(offs[i], d), z2));
            }
        }
    }
    incoming.values.resize(incoming.keys.size());
    outgoing.values.resize(outgoing.keys.size());
    auto unpack = [&](std::uint64_t key) {
        int const a2 = static_cast<int>(key >> 42);
        int const d = static_cast<int>((key >> 21) & ((1u << 21) - 1)) - (1 << 20);
        int const z2 = static_cast<int>(key & ((1u << 21) - 1));
        return key_vectors(a2, d, z2, h);
    };
    parallel_for(incoming.keys.size(), threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t k = b0; k < b1; ++k) {
            auto const [aw, z] = unpack(incoming.keys[k]);
            double v = truncated_gain_kernel(aw, z, be, M0, cut, opt.panel_scale);
            if (include_self) {
                v += truncated_gain_kernel(aw, z, ba, F, cut, opt.panel_scale);
            }
            incoming.values[k] = v;
        }
    });
    parallel_for(outgoing.keys.size(), threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t k = b0; k < b1; ++k) {
            auto const [a, z] = unpack(outgoing.keys[k]);
            outgoing.values[k] = partner_kernel(a, z, ba, F, opt.panel_scale, &cut);
        }
    });

    out.A = out.full;
    out.A.kind = OperatorKind::a_part;
    out.A.split = split;
    out.A.entries.setZero();
    double const tau3 = cut.angular_mass();
    parallel_for(n, threads, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            if (row_cut[i] == 0.0) {
                continue;
            }
            Offset const& pi = offs[i];
            int const a2 = dot3(pi, pi);
            double const fi = include_self ? F(h * std::sqrt(static_cast<double>(a2))) : 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    continue;
                }
                Offset const d = sub3(pi, offs[j]);
                int const z2 = dot3(d, d);
                double k = incoming.at(pack_key(dot3(offs[j], offs[j]), dot3(offs[j], d), z2));
                if (include_self) {
                    double const zl = h * std::sqrt(static_cast<double>(z2));
                    k += outgoing.at(pack_key(a2, dot3(pi, d), z2));
                    k -= fi * tau3 * zl * cut.relative_cut(zl);
                }
                out.A.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row_cut[i] * h3 * k;
            }
        }
    });
    out.B = out.full;
    out.B.kind = OperatorKind::b_part;
    out.B.split = split;
    out.B.entries = out.full.entries - out.A.entries;
    return out;
}

std::vector<double> sample_on_grid(VelocityGrid const& grid, RadialDensity const& F)
{
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = F.at(grid.node(i));
    }
    return out;
}

double grid_mass(VelocityGrid const& grid, RadialDensity const& F)
{
    long double acc = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        acc += F.at(grid.node(i));
    }
    return static_cast<double>(acc) * grid.quad_weight();
}

double mass_residual(OperatorMatrix const& m, double inner_fraction)
{
    double const h3 = m.grid.quad_weight();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
        if (norm(m.grid.node(static_cast<std::size_t>(j)) - m.bath.u0) > inner_fraction * m.grid.R) {
            continue;
        }
        worst = std::max(worst, std::abs(h3 * m.entries.col(j).sum()));
    }
    return worst / m.rate_scale;
}

NullResidual null_residual(OperatorMatrix const& m, std::vector<double> const& candidate)
{
    if (candidate.size() != static_cast<std::size_t>(m.entries.rows())) {
        throw std::invalid_argument("candidate size does not match the operator");
    }
    Eigen::Map<Eigen::VectorXd const> f(candidate.data(), static_cast<Eigen::Index>(candidate.size()));
    NullResidual out;
    out.raw = (m.entries * f).norm() / f.norm();
    out.relative = out.raw / m.rate_scale;
    return out;
}

double max_row_sum(Eigen::MatrixXd const& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

} // namespace gbk
