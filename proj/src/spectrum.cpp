#include "gbk/spectrum.hpp"

#include "gbk/rng.hpp"

#include <fmt/core.h>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace gbk {

namespace {

constexpr Eigen::Index kMaxDim = 20000;

void guard(Eigen::MatrixXd const& a)
{
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("eigen-solve requires a square matrix");
    }
    if (a.rows() > kMaxDim) {
        throw std::invalid_argument(fmt::format("{} dims exceeds the dense eigen-solve guard of {}", a.rows(), kMaxDim));
    }
    if (!a.allFinite()) {
        throw std::invalid_argument("matrix has non-finite entries");
    }
}

void sort_desc(std::vector<std::complex<double>>& ev)
{
    std::sort(ev.begin(), ev.end(), [](auto const& x, auto const& y) {
        if (x.real() != y.real()) {
            return x.real() > y.real();
        }
        return x.imag() > y.imag();
    });
}

std::string condition_note(Eigen::MatrixXd const& a)
{
    double const big = a.cwiseAbs().maxCoeff();
    double const rows = a.cwiseAbs().rowwise().sum().maxCoeff();
    return fmt::format("max |entry| {:.3e}, max row sum {:.3e}", big, rows);
}

} // namespace

std::vector<std::complex<double>> dense_eigenvalues(Eigen::MatrixXd const& a)
{
    guard(a);
    auto const n = static_cast<lapack_int>(a.rows());
    std::vector<std::complex<double>> out;
    {
        Eigen::MatrixXd work = a;
        std::vector<double> wr(static_cast<std::size_t>(n));
        std::vector<double> wi(static_cast<std::size_t>(n));
        lapack_int const info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(), wi.data(),
                                              nullptr, 1, nullptr, 1);
        if (info != 0) {
            throw std::runtime_error(fmt::format("dgeev failed (info {}); {}", info, condition_note(a)));
        }
        out.reserve(wr.size());
        for (std::size_t i = 0; i < wr.size(); ++i) {
            out.emplace_back(wr[i], wi[i]);
        }
    }
    sort_desc(out);
    return out;
}

Eigen::VectorXd inverse_iteration(Eigen::MatrixXd const& a, double shift, Eigen::VectorXd start, int iterations)
{
    guard(a);
    auto const n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd lu = a;
    lu.diagonal().array() -= shift;
    std::vector<lapack_int> piv(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, piv.data());
    if (info < 0) {
        throw std::runtime_error(fmt::format("dgetrf failed (info {})", info));
    }
    if (info > 0) {
        // exactly singular: the shift is an eigenvalue to machine precision
        lu = a;
        lu.diagonal().array() -= shift + 1e-12 * std::max(1.0, std::abs(shift));
        info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, lu.data(), n, piv.data());
        if (info != 0) {
            throw std::runtime_error(fmt::format("dgetrf failed after perturbing the shift (info {})", info));
        }
    }
    Eigen::VectorXd x = std::move(start);
    x.normalize();
    for (int it = 0; it < iterations; ++it) {
        info = LAPACKE_dgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lu.data(), n, piv.data(), x.data(), n);
        if (info != 0) {
            throw std::runtime_error(fmt::format("dgetrs failed (info {})", info));
        }
        double const nx = x.norm();
        if (!(nx > 0.0) || !std::isfinite(nx)) {
            throw std::runtime_error("inverse iteration diverged");
        }
        x /= nx;
    }
    return x;
}

RealPartHistogram real_part_histogram(std::vector<std::complex<double>> const& ev, double scale, std::size_t bins)
{
    if (bins == 0 || !(scale > 0.0)) {
        throw std::invalid_argument("histogram needs bins > 0 and a positive scale");
    }
    RealPartHistogram h;
    if (ev.empty()) {
        return h;
    }
    auto const [lo_it, hi_it] =
        std::minmax_element(ev.begin(), ev.end(), [](auto const& x, auto const& y) { return x.real() < y.real(); });
    double const lo = lo_it->real() / scale;
    double hi = hi_it->real() / scale;
    if (hi <= lo) {
        hi = lo + 1.0;
    }
    double const width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t k = 0; k <= bins; ++k) {
        h.edges.push_back(lo + width * static_cast<double>(k));
    }
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (auto const& z : ev) {
        auto k = static_cast<std::size_t>((z.real() / scale - lo) / width);
        ++h.counts[std::min(k, bins - 1)];
    }
    return h;
}

SpectrumReport spectrum(OperatorMatrix const& m, std::vector<double> const& candidate, bool eigenvector)
{
    SpectrumReport rep;
    rep.rate_scale = m.rate_scale;
    rep.eigenvalues = dense_eigenvalues(m.entries);
    auto const& ev = rep.eigenvalues;
    auto const nearest = std::min_element(ev.begin(), ev.end(), [](auto const& x, auto const& y) {
        return std::abs(x) < std::abs(y);
    });
    rep.nearest_zero = *nearest;
    double top = -std::numeric_limits<double>::infinity();
    for (auto it = ev.begin(); it != ev.end(); ++it) {
        if (it != nearest) {
            top = std::max(top, it->real());
        }
        rep.max_imag = std::max(rep.max_imag, std::abs(it->imag()) / m.rate_scale);
    }
    rep.spectral_gap = -top;
    if (rep.spectral_gap <= 0.0) {
        rep.notes.push_back("a second eigenvalue has nonnegative real part");
    }
    if (nearest->imag() != 0.0) {
        rep.notes.push_back("eigenvalue nearest zero is not real");
    }
    auto const nr = null_residual(m, candidate);
    rep.null_residual = nr.relative;
    rep.null_residual_raw = nr.raw;
    rep.mass_residual = mass_residual(m);
    rep.real_parts = real_part_histogram(ev, m.rate_scale);
    if (eigenvector && nearest->imag() == 0.0) {
        Eigen::Map<Eigen::VectorXd const> c(candidate.data(), static_cast<Eigen::Index>(candidate.size()));
        Eigen::VectorXd const x = inverse_iteration(m.entries, nearest->real(), c);
        rep.eigenvector_cosine = std::abs(x.dot(c)) / (x.norm() * c.norm());
    }
    return rep;
}

double weighted_symmetry_defect(Eigen::MatrixXd const& a, std::vector<double> const& weight)
{
    if (static_cast<Eigen::Index>(weight.size()) != a.rows()) {
        throw std::invalid_argument("weight size does not match the matrix");
    }
    Eigen::Map<Eigen::VectorXd const> w(weight.data(), static_cast<Eigen::Index>(weight.size()));
    if ((w.array() <= 0.0).any()) {
        throw std::invalid_argument("symmetrizing weight must be positive");
    }
    Eigen::VectorXd const s = w.array().sqrt();
    Eigen::VectorXd const si = s.cwiseInverse();
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            double const sij = si(i) * a(i, j) * s(j);
            double const sji = si(j) * a(j, i) * s(i);
            num += (sij - sji) * (sij - sji);
            den += sij * sij;
        }
    }
    return std::sqrt(num / den);
}

double dissipativity_probe(Eigen::MatrixXd const& a, std::vector<double> const& weight, int samples,
                           std::uint64_t seed)
{
    if (static_cast<Eigen::Index>(weight.size()) != a.rows()) {
        throw std::invalid_argument("weight size does not match the matrix");
    }
    Eigen::Map<Eigen::VectorXd const> w(weight.data(), static_cast<Eigen::Index>(weight.size()));
    Eigen::VectorXd const winv = w.cwiseInverse();
    auto rng = make_stream(seed, 0, 0, 0);
    std::normal_distribution<double> gauss;
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        // h = sqrt(w) g projected to be orthogonal to w in the 1/w inner product (zero mass)
        Eigen::VectorXd h(w.size());
        for (Eigen::Index i = 0; i < h.size(); ++i) {
            h(i) = std::sqrt(w(i)) * gauss(rng);
        }
        h -= (h.sum() / w.sum()) * w;
        Eigen::VectorXd const ah = a * h;
        double const num = (h.array() * ah.array() * winv.array()).sum();
        double const den = (h.array() * h.array() * winv.array()).sum();
        worst = std::max(worst, num / den);
    }
    return worst;
}

std::vector<std::complex<double>> fourier_mode_eigenvalues(OperatorMatrix const& m, Vec3 const& k)
{
    guard(m.entries);
    auto const n = static_cast<lapack_int>(m.entries.rows());
    Eigen::MatrixXcd work = m.entries.cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < work.rows(); ++i) {
        work(i, i) -= std::complex<double>(0.0, dot(k, m.grid.node(static_cast<std::size_t>(i))));
    }
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
    lapack_int const info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, out.data(), nullptr, 1, nullptr, 1);
    if (info != 0) {
        throw std::runtime_error(fmt::format("zgeev failed (info {}); {}", info, condition_note(m.entries)));
    }
    sort_desc(out);
    return out;
}

} // namespace gbk
