#include "gbk/config.hpp"
#include "gbk/spectrum.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace gbk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("dense eigenvalues of a similarity transform of a known spectrum", "[spectrum]")
{
    int const n = 6;
    Eigen::VectorXd d(n);
    d << 3.0, -1.0, 0.5, -7.0, 2.0, 0.0;
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            s(i, j) += 0.1 * std::sin(1.0 + i * 7 + j * 3);
        }
    }
    Eigen::MatrixXd const a = s * d.asDiagonal() * s.inverse();
    auto const ev = dense_eigenvalues(a);
    REQUIRE(ev.size() == static_cast<std::size_t>(n));
    std::vector<double> sorted(d.data(), d.data() + n);
    std::sort(sorted.rbegin(), sorted.rend());
    for (int i = 0; i < n; ++i) {
        REQUIRE_THAT(ev[i].real(), WithinAbs(sorted[i], 1e-10));
        REQUIRE_THAT(ev[i].imag(), WithinAbs(0.0, 1e-10));
    }
    // rotation block gives a conjugate pair
    Eigen::MatrixXd r(2, 2);
    r << -1.0, 2.0, -2.0, -1.0;
    auto const pair = dense_eigenvalues(r);
    REQUIRE_THAT(std::abs(pair[0].imag()), WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(pair[0].real(), WithinAbs(-1.0, 1e-12));
}

TEST_CASE("inverse iteration finds the eigenvector near a shift", "[spectrum]")
{
    Eigen::MatrixXd a(3, 3);
    a << 2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXd const ref = es.eigenvectors().col(0);
    Eigen::VectorXd const v = inverse_iteration(a, es.eigenvalues()(0) + 1e-3, Eigen::VectorXd::Ones(3));
    REQUIRE_THAT(std::abs(v.normalized().dot(ref)), WithinAbs(1.0, 1e-10));
    // exact shift is perturbed rather than failing
    Eigen::VectorXd const w = inverse_iteration(a, es.eigenvalues()(0), Eigen::VectorXd::Ones(3));
    REQUIRE_THAT(std::abs(w.normalized().dot(ref)), WithinAbs(1.0, 1e-8));
}

TEST_CASE("weighted symmetry defect", "[spectrum]")
{
    // A = D^{1/2} S D^{-1/2} with S symmetric has zero defect for weight D
    Eigen::MatrixXd s(3, 3);
    s << -2.0, 0.5, 0.1, 0.5, -1.0, 0.3, 0.1, 0.3, -3.0;
    std::vector<double> const w{1.0, 4.0, 0.25};
    Eigen::MatrixXd a(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            a(i, j) = std::sqrt(w[i]) * s(i, j) / std::sqrt(w[j]);
        }
    }
    REQUIRE(weighted_symmetry_defect(a, w) < 1e-15);
    a(0, 1) += 0.2;
    REQUIRE(weighted_symmetry_defect(a, w) > 1e-3);
}

TEST_CASE("spectrum of the elastic bath operator", "[spectrum]")
{
    BathParams const bath{{}, 1.0};
    auto const g = make_grid(GridParams{11, 0.0}, 1.0, bath);
    auto const m = assemble_bath_operator(g, 1.0, bath);
    auto const candidate = sample_on_grid(g, RadialDensity::maxwellian({}, 1.0));
    auto const rep = spectrum(m, candidate);
    REQUIRE(std::abs(rep.nearest_zero) < 0.05 * rep.rate_scale);
    REQUIRE(rep.spectral_gap > 0.0);
    REQUIRE(rep.eigenvector_cosine > 0.999);
    REQUIRE(rep.null_residual < 2e-2);
    REQUIRE(rep.max_imag < 1e-8);
    REQUIRE(dissipativity_probe(m.entries, candidate, 50, 3) < 0.0);

    // k = 0 reproduces the spatially homogeneous spectrum
    auto const k0 = fourier_mode_eigenvalues(m, Vec3{});
    REQUIRE_THAT(k0.front().real(), WithinAbs(rep.eigenvalues.front().real(), 1e-8 * rep.rate_scale));
    auto const k1 = fourier_mode_eigenvalues(m, Vec3{0.5, 0.0, 0.0});
    REQUIRE(k1.size() == g.size());
    for (auto const& z : k1) {
        REQUIRE(z.real() <= 1e-6 * rep.rate_scale + std::abs(rep.nearest_zero));
    }
}

TEST_CASE("histogram of eigenvalue real parts", "[spectrum]")
{
    std::vector<std::complex<double>> ev{{0.0, 0.0}, {-1.2, 2.0}, {-1.2, -2.0}, {-4.0, 0.0}};
    auto const h = real_part_histogram(ev, 2.0, 4);
    REQUIRE(h.edges.size() == 5);
    REQUIRE(h.edges.front() == -2.0);
    REQUIRE(h.edges.back() == 0.0);
    REQUIRE(h.counts == std::vector<std::size_t>{1, 0, 2, 1});
    REQUIRE_THROWS_AS(real_part_histogram(ev, 0.0), std::invalid_argument);
}
