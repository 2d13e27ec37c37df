// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is nonzero if any criterion fails.

#include "gbk/verify.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv)
{
    gbk::VerifyOptions opt;
    if (char const* s = std::getenv("GBK_VERIFY_SEED")) {
        opt.seed = std::stoull(s);
    }
    for (int i = 1; i < argc; ++i) {
        opt.only.insert(std::stoi(argv[i]));
    }
    opt.on_result = [](gbk::CriterionResult const& r) { std::cout << gbk::format_result_line(r) << std::endl; };
    auto const results = gbk::run_verification(opt);
    int failed = 0;
    for (auto const& r : results) {
        failed += r.passed ? 0 : 1;
    }
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
