#pragma once

#include "gbk/operators.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace gbk {

/// Counts of Re(lambda) / rate_scale over equal-width bins spanning the spectrum.
struct RealPartHistogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
};
RealPartHistogram real_part_histogram(std::vector<std::complex<double>> const& ev, double scale, std::size_t bins = 24);

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues; // sorted by real part, descending
    std::complex<double> nearest_zero{};
    double spectral_gap{0.0};       // -max Re over all eigenvalues except nearest_zero
    double null_residual{0.0};      // relative to rate_scale
    double null_residual_raw{0.0};  // ||A f|| / ||f||
    double mass_residual{0.0};
    double eigenvector_cosine{-1.0}; // negative when not computed
    double max_imag{0.0};           // largest |Im lambda| / rate_scale
    double rate_scale{1.0};
    RealPartHistogram real_parts;
    std::vector<std::string> notes;
};

/// Dense nonsymmetric eigenvalues (LAPACK dgeev), sorted by real part descending.
std::vector<std::complex<double>> dense_eigenvalues(Eigen::MatrixXd const& a);

/// Real eigenvector for a real eigenvalue near `shift`, by shifted inverse iteration.
Eigen::VectorXd inverse_iteration(Eigen::MatrixXd const& a, double shift, Eigen::VectorXd start, int iterations = 4);

/// Eigen-decomposes m and compares the null direction with `candidate`.
SpectrumReport spectrum(OperatorMatrix const& m, std::vector<double> const& candidate, bool eigenvector = true);

/// ||S - S^T||_F / ||S||_F for S = D^{-1/2} A D^{1/2}, D = diag(weight).
double weighted_symmetry_defect(Eigen::MatrixXd const& a, std::vector<double> const& weight);

/// max over random h orthogonal to weight of <h, A h>_{1/weight} / <h, h>_{1/weight}.
double dissipativity_probe(Eigen::MatrixXd const& a, std::vector<double> const& weight, int samples,
                           std::uint64_t seed);

/// Eigenvalues of A - i diag(k . v_j), the single spatial Fourier mode k.
std::vector<std::complex<double>> fourier_mode_eigenvalues(OperatorMatrix const& m, Vec3 const& k);

} // namespace gbk
