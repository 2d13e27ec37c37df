#pragma once

#include "gbk/report.hpp"

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace gbk {

struct CriterionResult {
    int id{0};
    std::string name;
    bool passed{false};
    std::string summary;
    Json details;
    double seconds{0.0};
};

struct VerifyOptions {
    std::uint64_t seed{20240611};
    int threads{0};
    std::set<int> only; // empty runs every criterion
    std::function<void(CriterionResult const&)> on_result;
};

constexpr int kCriterionCount = 13;

std::string criterion_name(int id);

/// Runs the acceptance criteria in order; results are also passed to on_result as they finish.
std::vector<CriterionResult> run_verification(VerifyOptions const& opt);

/// "PASS  C1 collision identities: ..." style line.
std::string format_result_line(CriterionResult const& r);

} // namespace gbk
