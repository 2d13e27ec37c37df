#include "gbk/lattice_correction.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace gbk {

SingularCorrection::SingularCorrection()
{
    int const reach = static_cast<int>(6.0 * kScales.back());
    double const r2max = static_cast<double>(reach) * reach;
    for (int x = 0; x <= reach; ++x) {
        for (int y = -reach; y <= reach; ++y) {
            for (int z = -reach; z <= reach; ++z) {
                // half lattice: the mirror point -j carries the same weight since g is even
                bool const upper = x > 0 || (x == 0 && (y > 0 || (y == 0 && z > 0)));
                if (!upper) {
                    continue;
                }
                double const r2 = static_cast<double>(x * x + y * y + z * z);
                if (r2 >= r2max) {
                    continue;
                }
                double const r = std::sqrt(r2);
                Point p;
                p.dir = Vec3{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)} / r;
                for (std::size_t k = 0; k < kScales.size(); ++k) {
                    p.w[k] = 2.0 * std::exp(-r2 / (kScales[k] * kScales[k])) / r;
                }
                points_.push_back(p);
            }
        }
    }
}

std::array<double, 3> SingularCorrection::raw_sums(std::function<double(double)> const& g, Vec3 const& a) const
{
    std::array<double, 3> sums{0.0, 0.0, 0.0};
    for (auto const& p : points_) {
        double const v = g(dot(p.dir, a));
        for (std::size_t k = 0; k < 3; ++k) {
            sums[k] += v * p.w[k];
        }
    }
    double const len = norm(a);
    auto sphere = [&](double x) { return g(len * x); };
    double const ring =
        2.0 * std::numbers::pi *
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(sphere, -1.0, 1.0, 15, 1e-13);
    for (std::size_t k = 0; k < 3; ++k) {
        sums[k] -= 0.5 * kScales[k] * kScales[k] * ring;
    }
    return sums;
}

double SingularCorrection::constant(std::function<double(double)> const& g, Vec3 const& a) const
{
    auto const e = raw_sums(g, a);
    Eigen::Matrix3d m;
    Eigen::Vector3d rhs;
    for (int k = 0; k < 3; ++k) {
        double const l2 = kScales[static_cast<std::size_t>(k)] * kScales[static_cast<std::size_t>(k)];
        m(k, 0) = 1.0;
        m(k, 1) = 1.0 / l2;
        m(k, 2) = 1.0 / (l2 * l2);
        rhs(k) = e[static_cast<std::size_t>(k)];
    }
    return m.fullPivLu().solve(rhs)(0);
}

} // namespace gbk
