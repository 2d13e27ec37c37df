#include "gbk/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gbk {

namespace {

constexpr double kRelTol = 1e-12;

struct SlackTracker {
    CheckResult& out;
    bool first{true};

    void add(double lhs, double rhs, std::vector<std::pair<std::string, double>> point)
    {
        double const slack = rhs - lhs;
        double const scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        ++out.trials;
        if (slack < -kRelTol * scale) {
            ++out.violations;
            out.passed = false;
        }
        if (first || slack > out.max_slack) {
            out.max_slack = slack;
        }
        if (first || slack < out.worst_slack) {
            out.worst_slack = slack;
            point.emplace_back("lhs", lhs);
            point.emplace_back("rhs", rhs);
            out.witness = std::move(point);
        }
        first = false;
    }
};

double log_uniform(Rng& rng, double lo, double hi)
{
    return std::exp(std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo)));
}

} // namespace

double power_split_constant(double beta) { return std::pow(2.0, 0.5 * beta) - 1.0; }

StretchedBound stretched_gaussian_bound(double b, double gamma, double beta, double beta0)
{
    if (!(beta > 0.0 && beta < 1.0) || !(beta0 > 0.0) || !(b + gamma > 0.0)) {
        throw std::invalid_argument("stretched bound needs 0 < beta < 1, beta0 > 0, b + gamma > 0");
    }
    StretchedBound s;
    s.x_star = std::pow(beta * (b + gamma) / (2.0 * beta0), 1.0 / (2.0 - beta));
    s.c_gamma = (b + gamma) * std::pow(s.x_star, beta) - beta0 * s.x_star * s.x_star;
    return s;
}

CheckResult check_power_split(double beta, std::size_t trials, Rng& rng)
{
    CheckResult out;
    out.name = "power_split";
    out.params = {{"beta", beta}, {"c_beta", power_split_constant(beta)}};
    SlackTracker track{out};
    double const p = 0.5 * beta;
    double const c = power_split_constant(beta);
    auto test = [&](double a, double x) {
        double const lhs = std::pow(a - x, p);
        double const rhs = std::pow(a, p) - c * std::pow(x, p);
        track.add(lhs, rhs, {{"a", a}, {"x", x}});
    };
    test(1.0, 0.0);
    test(1.0, 0.5);
    for (std::size_t k = 2; k < trials; ++k) {
        double const a = log_uniform(rng, 1e-3, 1e3);
        double const x = 0.5 * a * uniform01(rng);
        test(a, x);
    }
    return out;
}

CheckResult check_stretched_gaussian(double b, double gamma, double beta, double beta0, std::size_t trials, Rng& rng)
{
    CheckResult out;
    out.name = "stretched_gaussian";
    auto const bound = stretched_gaussian_bound(b, gamma, beta, beta0);
    out.params = {{"b", b}, {"gamma", gamma}, {"beta", beta}, {"beta0", beta0}, {"x_star", bound.x_star},
                  {"c_gamma", bound.c_gamma}};
    SlackTracker track{out};
    auto test = [&](double r) {
        double const rb = std::pow(r, beta);
        double const lhs = b * rb - beta0 * r * r;
        double const rhs = bound.c_gamma - gamma * rb;
        track.add(lhs, rhs, {{"r", r}});
    };
    test(0.0);
    test(bound.x_star);
    for (std::size_t k = 2; k < trials; ++k) {
        double const r = (k % 2 == 0) ? 3.0 * bound.x_star * uniform01(rng)
                                      : bound.x_star * log_uniform(rng, 1e-6, 1e3);
        test(r);
    }
    return out;
}

std::vector<CheckResult> inequality_suite(WeightParams const& w, std::size_t trials, Rng& rng)
{
    if (trials < 100) {
        throw std::invalid_argument("inequality suite needs at least 100 trials");
    }
    w.validate();
    double const gamma = log_uniform(rng, 0.1, 10.0);
    double const beta0 = log_uniform(rng, 0.1, 10.0);
    std::vector<CheckResult> out;
    out.push_back(check_power_split(w.beta, trials, rng));
    out.push_back(check_stretched_gaussian(w.b, gamma, w.beta, beta0, trials, rng));
    return out;
}

std::vector<CheckResult> inequality_suite_random(std::size_t tuples, std::size_t trials, std::uint64_t seed)
{
    std::vector<CheckResult> out;
    for (std::size_t t = 0; t < tuples; ++t) {
        Rng rng = make_stream(seed, 7, t);
        WeightParams w;
        w.beta = 0.05 + 0.9 * uniform01(rng);
        w.b = log_uniform(rng, 0.05, 5.0);
        w.q = static_cast<int>(rng() % 5);
        auto part = inequality_suite(w, trials, rng);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

} // namespace gbk
