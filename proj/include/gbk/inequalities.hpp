#pragma once

#include "gbk/kinetics.hpp"
#include "gbk/rng.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gbk {

struct CheckResult {
    std::string name;
    bool passed{true};
    std::size_t trials{0};
    std::size_t violations{0};
    double max_slack{0.0};   // largest rhs - lhs seen
    double worst_slack{0.0}; // smallest rhs - lhs seen
    std::vector<std::pair<std::string, double>> witness; // at the worst point
    std::vector<std::pair<std::string, double>> params;
};

/// C_beta = 2^(beta/2) - 1.
double power_split_constant(double beta);

struct StretchedBound {
    double x_star{0.0};
    double c_gamma{0.0};
};

/// Maximizer and maximum of (b + gamma) x^beta - beta0 x^2 over x >= 0.
StretchedBound stretched_gaussian_bound(double b, double gamma, double beta, double beta0);

/// (a - x)^(beta/2) <= a^(beta/2) - C_beta x^(beta/2) for 0 <= x <= a/2.
CheckResult check_power_split(double beta, std::size_t trials, Rng& rng);

/// b r^beta - beta0 r^2 <= C_gamma - gamma r^beta for r >= 0.
CheckResult check_stretched_gaussian(double b, double gamma, double beta, double beta0, std::size_t trials, Rng& rng);

/// Both checks for one weight; gamma and beta0 are drawn from rng.
std::vector<CheckResult> inequality_suite(WeightParams const& w, std::size_t trials, Rng& rng);

/// inequality_suite over `tuples` random weights.
std::vector<CheckResult> inequality_suite_random(std::size_t tuples, std::size_t trials, std::uint64_t seed);

} // namespace gbk
