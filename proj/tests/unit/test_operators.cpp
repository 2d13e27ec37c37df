#include "gbk/config.hpp"
#include "gbk/operators.hpp"
#include "gbk/spectrum.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <numbers>

using namespace gbk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

// int kernel(z) d^3z for a kernel that is axially symmetric about the z axis.
double axial_integral(std::function<double(Vec3 const&)> const& kernel, double r_top)
{
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto shell = [&](double r) {
        if (r == 0.0) {
            return 0.0;
        }
        auto polar = [&](double c) {
            double const s = std::sqrt(std::max(0.0, 1.0 - c * c));
            return kernel(Vec3{r * s, 0.0, r * c});
        };
        return 2.0 * kPi * r * r * gk::integrate(polar, -1.0, 1.0, 12, 1e-11);
    };
    return gk::integrate(shell, 0.0, r_top, 12, 1e-9);
}

VelocityGrid grid_for(int n, double e, BathParams const& bath)
{
    return make_grid(GridParams{n, 0.0}, e, bath);
}

} // namespace

TEST_CASE("smooth step and truncation cutoffs", "[operators]")
{
    REQUIRE(smooth_step(-0.1) == 0.0);
    REQUIRE(smooth_step(1.2) == 1.0);
    REQUIRE_THAT(smooth_step(0.5), WithinAbs(0.5, 1e-15));
    REQUIRE_THAT(smooth_step(0.3) + smooth_step(0.7), WithinAbs(1.0, 1e-15));
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        double const s = smooth_step(i / 100.0);
        REQUIRE(s >= prev);
        prev = s;
    }

    Truncation const cut(SplitParams{0.5, 0.5});
    REQUIRE(cut.speed_cut(1.9) == 1.0);
    REQUIRE(cut.speed_cut(3.0) == 0.0);
    REQUIRE(cut.speed_support() == 3.0);
    REQUIRE(cut.relative_cut(0.4) == 0.0);
    REQUIRE(cut.relative_cut(1.5) == 1.0);
    REQUIRE(cut.relative_cut(3.1) == 0.0);
    REQUIRE(cut.angle_cut(0.0) == 1.0);
    REQUIRE(cut.angle_cut(0.99) == 0.0);
    double trap = 0.0;
    int const n = 200000;
    for (int i = 0; i <= n; ++i) {
        double const c = -1.0 + 2.0 * i / n;
        trap += (i == 0 || i == n ? 0.5 : 1.0) * cut.angle_cut(c);
    }
    REQUIRE_THAT(cut.angular_mass(), WithinRel(2.0 * kPi * trap * 2.0 / n, 1e-8));
    REQUIRE_THROWS(SplitParams{1.0, 0.5}.validate());
    REQUIRE_THROWS(SplitParams{0.5, 0.0}.validate());
}

TEST_CASE("gain kernel integrates to the collision frequency", "[operators]")
{
    auto const F = RadialDensity::maxwellian({}, 0.8);
    for (double b : {1.0, 0.75, 0.55}) {
        for (double s : {0.0, 0.7, 2.0}) {
            Vec3 const a_w{0.0, 0.0, s};
            double const total =
                axial_integral([&](Vec3 const& z) { return gain_kernel(a_w, z, b, F); }, s + 12.0);
            REQUIRE_THAT(total, WithinRel(F.collision_frequency(s), 1e-6));
        }
    }
}

TEST_CASE("partner kernel integrates to the collision frequency", "[operators]")
{
    auto const F = RadialDensity::maxwellian({}, 0.6);
    for (double b : {1.0, 0.95, 0.8}) {
        for (double s : {0.3, 1.5}) {
            Vec3 const a_w{0.0, 0.0, s};
            double const total =
                axial_integral([&](Vec3 const& z) { return partner_kernel(a_w + z, z, b, F); }, s + 10.0);
            REQUIRE_THAT(total, WithinRel(F.collision_frequency(s), 1e-5));
        }
    }
}

TEST_CASE("elastic partner and gain kernels coincide", "[operators]")
{
    auto const F = RadialDensity::maxwellian({}, 1.0);
    Rng rng = make_stream(5);
    std::normal_distribution<double> g(0.0, 1.2);
    for (int i = 0; i < 200; ++i) {
        Vec3 const a_w{g(rng), g(rng), g(rng)};
        Vec3 const z{g(rng), g(rng), g(rng)};
        REQUIRE_THAT(partner_kernel(a_w + z, z, 1.0, F), WithinRel(gain_kernel(a_w, z, 1.0, F), 1e-12));
        // the quadrature branch approaches the closed form as b -> 1
        REQUIRE_THAT(partner_kernel(a_w + z, z, 1.0 - 1e-7, F),
                     WithinAbs(gain_kernel(a_w, z, 1.0, F), 1e-4 * (1.0 + gain_kernel(a_w, z, 1.0, F))));
    }
}

TEST_CASE("bath operator annihilates the elastic-limit maxwellian", "[operators]")
{
    BathParams const bath{{}, 1.0};
    double const e = 0.5;
    auto const F = RadialDensity::maxwellian({}, theta_sharp(e, 1.0));
    auto const g13 = grid_for(13, e, bath);
    auto const g17 = grid_for(17, e, bath);
    auto const m13 = assemble_bath_operator(g13, e, bath);
    auto const m17 = assemble_bath_operator(g17, e, bath);
    double const r13 = null_residual(m13, sample_on_grid(g13, F)).relative;
    double const r17 = null_residual(m17, sample_on_grid(g17, F)).relative;
    REQUIRE(r13 < 2e-2);
    REQUIRE(r17 < 0.5 * r13);
    REQUIRE(mass_residual(m17) < mass_residual(m13));

    // gain entries are nonnegative and the diagonal is negative
    auto const& a = m13.entries;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        REQUIRE(a(i, i) < 0.0);
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j) {
                REQUIRE(a(i, j) >= 0.0);
            }
        }
    }
    // bath-only operator: the scale is the bath collision frequency at u0
    REQUIRE_THAT(m13.rate_scale, WithinRel(collision_frequency_nu_radial(0.0, 1.0), 1e-12));
}

TEST_CASE("bath operator is reversible with respect to its equilibrium", "[operators]")
{
    BathParams const bath{{}, 1.0};
    double const e = 0.5;
    auto const g = grid_for(13, e, bath);
    auto const m = assemble_bath_operator(g, e, bath);
    auto const w = sample_on_grid(g, RadialDensity::maxwellian({}, theta_sharp(e, 1.0)));
    REQUIRE(weighted_symmetry_defect(m.entries, w) < 1e-10);
}

TEST_CASE("assembly is deterministic across thread counts", "[operators]")
{
    BathParams const bath{{}, 1.0};
    auto const g = grid_for(9, 1.0, bath);
    AssemblyOptions one;
    one.threads = 1;
    AssemblyOptions many;
    many.threads = 4;
    auto const a = assemble_bath_operator(g, 1.0, bath, one);
    auto const b = assemble_bath_operator(g, 1.0, bath, many);
    REQUIRE(a.entries == b.entries);
}

TEST_CASE("assembly checks grid and density centers", "[operators]")
{
    BathParams const bath{{0.5, 0.0, 0.0}, 1.0};
    auto const off = VelocityGrid::make(6.0, 9, {}, 1.0);
    REQUIRE_THROWS_AS(assemble_bath_operator(off, 1.0, bath), std::invalid_argument);
    auto const g = VelocityGrid::make(6.0, 9, bath.u0, 1.0);
    REQUIRE_THROWS_AS(assemble_linearized(g, 1.0, 1.0, bath, RadialDensity::maxwellian({}, 1.0)), std::invalid_argument);
}

TEST_CASE("split parts add up to the full operator", "[operators]")
{
    BathParams const bath{{}, 1.0};
    double const e = 0.5;
    auto const g = grid_for(11, e, bath);
    auto const s = assemble_split(g, 1.0, e, bath, SplitParams{0.5, 0.5});
    REQUIRE((s.A.entries + s.B.entries - s.full.entries).cwiseAbs().maxCoeff() < 1e-13);
    Truncation const cut(SplitParams{0.5, 0.5});
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (cut.speed_cut(norm(g.node(i))) == 0.0) {
            REQUIRE(s.A.entries.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    REQUIRE(s.A.entries.cwiseAbs().maxCoeff() > 0.0);
    // 2 / delta must fit inside the grid
    REQUIRE_THROWS_AS(assemble_split(g, 1.0, e, bath, SplitParams{0.3, 0.5}), std::invalid_argument);
}
