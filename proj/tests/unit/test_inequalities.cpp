#include "gbk/inequalities.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace gbk;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("power split constant", "[inequalities]")
{
    REQUIRE_THAT(power_split_constant(0.5), WithinRel(std::pow(2.0, 0.25) - 1.0, 1e-15));
    REQUIRE_THAT(power_split_constant(1.0), WithinRel(std::sqrt(2.0) - 1.0, 1e-15));
}

TEST_CASE("power split holds only at the endpoints of [0, a/2]", "[inequalities]")
{
    // (a - x)^p is concave in x and the right side is a^p - C x^p with C = 2^p - 1,
    // so the two sides meet at x = 0 and x = a/2 and the left side is larger in between.
    double const beta = 0.5;
    double const p = 0.5 * beta;
    double const c = power_split_constant(beta);
    auto lhs = [&](double a, double x) { return std::pow(a - x, p); };
    auto rhs = [&](double a, double x) { return std::pow(a, p) - c * std::pow(x, p); };

    REQUIRE_THAT(lhs(1.0, 0.5), WithinAbs(rhs(1.0, 0.5), 1e-15));
    REQUIRE_THAT(lhs(1.0, 0.0), WithinAbs(rhs(1.0, 0.0), 1e-15));
    // recorded counterexample
    REQUIRE_THAT(lhs(1.0, 0.25), WithinAbs(0.930605, 1e-6));
    REQUIRE_THAT(rhs(1.0, 0.25), WithinAbs(0.866210, 1e-6));

    Rng rng = make_stream(1);
    auto const res = check_power_split(beta, 10000, rng);
    REQUIRE_FALSE(res.passed);
    REQUIRE(res.trials == 10000);
    REQUIRE(res.violations >= 9990);
    REQUIRE(res.worst_slack < 0.0);
}

TEST_CASE("stretched gaussian bound matches a brute-force maximum", "[inequalities]")
{
    for (auto [b, gamma, beta, beta0] : {std::tuple{0.1, 1.0, 0.5, 0.3}, std::tuple{2.0, 0.5, 0.9, 5.0},
                                         std::tuple{0.01, 7.0, 0.1, 0.1}}) {
        auto const sb = stretched_gaussian_bound(b, gamma, beta, beta0);
        double best = 0.0;
        double best_x = 0.0;
        int const n = 400000;
        double const top = 4.0 * sb.x_star;
        for (int i = 0; i <= n; ++i) {
            double const x = top * i / n;
            double const g = (b + gamma) * std::pow(x, beta) - beta0 * x * x;
            if (g > best) {
                best = g;
                best_x = x;
            }
        }
        REQUIRE_THAT(sb.c_gamma, WithinRel(best, 1e-8));
        REQUIRE_THAT(sb.x_star, WithinRel(best_x, 1e-3));
    }
    REQUIRE_THROWS(stretched_gaussian_bound(0.1, 1.0, 1.0, 0.3));
}

TEST_CASE("stretched gaussian check never finds a violation", "[inequalities]")
{
    Rng rng = make_stream(2);
    auto const res = check_stretched_gaussian(0.3, 2.0, 0.6, 0.7, 50000, rng);
    REQUIRE(res.passed);
    REQUIRE(res.violations == 0);
    // attained at x_star
    REQUIRE_THAT(res.worst_slack, WithinAbs(0.0, 1e-12));
}

TEST_CASE("random suite is reproducible", "[inequalities]")
{
    auto const a = inequality_suite_random(3, 1000, 77);
    auto const b = inequality_suite_random(3, 1000, 77);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].name == b[i].name);
        REQUIRE(a[i].violations == b[i].violations);
        REQUIRE(a[i].worst_slack == b[i].worst_slack);
    }
    Rng rng = make_stream(3);
    REQUIRE_THROWS(inequality_suite(WeightParams{}, 10, rng));
}
