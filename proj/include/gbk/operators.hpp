#pragma once

#include "gbk/kinetics.hpp"
#include "gbk/radial_density.hpp"
#include "gbk/velocity_grid.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace gbk {

enum class OperatorKind { bath, linearized_elastic, linearized_inelastic, a_part, b_part };
std::string to_string(OperatorKind k);

struct SplitParams {
    double delta{0.5};
    double smoothing{0.5}; // fraction of each inner-to-outer gap used by the transition

    void validate() const;
};

/// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x);

/// Smooth cutoffs of the truncated collision kernel.
class Truncation {
public:
    explicit Truncation(SplitParams const& p);

    [[nodiscard]] double speed_cut(double r) const;    // on |v|
    [[nodiscard]] double relative_cut(double u) const; // on |v - v_*|
    [[nodiscard]] double angle_cut(double c) const;    // on cos(theta)
    /// 2 pi int_{-1}^{1} angle_cut(c) dc
    [[nodiscard]] double angular_mass() const noexcept { return angular_mass_; }
    [[nodiscard]] double speed_support() const noexcept { return r_in_ + width_r_; }
    /// |u| values where relative_cut changes character.
    [[nodiscard]] std::vector<double> relative_breaks() const;
    /// cos(theta) values where angle_cut changes character.
    [[nodiscard]] std::vector<double> angle_breaks() const;
    [[nodiscard]] double relative_support_low() const noexcept { return u_lo_ - width_lo_; }
    [[nodiscard]] double relative_support_high() const noexcept { return u_hi_ + width_hi_; }

private:
    double r_in_, width_r_;
    double u_lo_, width_lo_, u_hi_, width_hi_;
    double c_in_, width_c_;
    double angular_mass_{0.0};
};

struct OperatorMatrix {
    VelocityGrid grid{};
    Eigen::MatrixXd entries;
    OperatorKind kind{OperatorKind::bath};
    double alpha{1.0};
    double e{1.0};
    BathParams bath{};
    std::optional<SplitParams> split{};
    double rate_scale{1.0}; // collision frequency at the bath center, for normalized residuals
};

struct AssemblyOptions {
    bool corrected{true}; // diagonal correction of the 1/|z| kernel singularity
    int threads{1};
    double panel_scale{1.0}; // quadrature panel length in units of sqrt(theta_F)
};

/// Carleman-form gain kernel of a collision with restitution beta-form
/// coefficient b = (1+coef)/2, input velocity w (offset a_w from the partner
/// center) and output v = w + z: (4 / (b^2 |z|)) P_F(a_w . zhat + |z| / b).
double gain_kernel(Vec3 const& a_w, Vec3 const& z, double b, RadialDensity const& F);

/// Kernel for the partner's post-collision velocity v (offset a from the partner center), given the
/// tracked particle's input w = v - z.
double partner_kernel(Vec3 const& a, Vec3 const& z, double b, RadialDensity const& F, double panel_scale = 1.0,
                      Truncation const* cut = nullptr);

/// gain_kernel with the relative-speed and angle cutoffs applied inside the plane integral.
double truncated_gain_kernel(Vec3 const& a_w, Vec3 const& z, double b, RadialDensity const& F,
                             Truncation const& cut, double panel_scale = 1.0);

OperatorMatrix assemble_bath_operator(VelocityGrid const& grid, double e, BathParams const& bath,
                                      AssemblyOptions const& opt = {});

OperatorMatrix assemble_linearized(VelocityGrid const& grid, double alpha, double e, BathParams const& bath,
                                   RadialDensity const& F, AssemblyOptions const& opt = {});

struct SplitOperators {
    OperatorMatrix A;
    OperatorMatrix B;
    OperatorMatrix full;
};

/// A holds the truncated gain parts (and the truncated partner loss when
/// include_self), B = full - A. F defaults to M(theta_sharp).
SplitOperators assemble_split(VelocityGrid const& grid, double alpha, double e, BathParams const& bath,
                              SplitParams const& split, std::optional<RadialDensity> const& F = std::nullopt,
                              bool include_self = true, AssemblyOptions const& opt = {});

std::vector<double> sample_on_grid(VelocityGrid const& grid, RadialDensity const& F);

/// Quadrature mass of F on the grid.
double grid_mass(VelocityGrid const& grid, RadialDensity const& F);

/// max over columns j with |v_j - u0| <= inner_fraction R of |h^3 sum_i A_ij| / rate_scale.
double mass_residual(OperatorMatrix const& m, double inner_fraction = 0.5);

struct NullResidual {
    double raw{0.0};      // ||A f|| / ||f||
    double relative{0.0}; // raw / rate_scale
};
NullResidual null_residual(OperatorMatrix const& m, std::vector<double> const& candidate);

/// Induced infinity norm (max absolute row sum).
double max_row_sum(Eigen::MatrixXd const& a);

} // namespace gbk
