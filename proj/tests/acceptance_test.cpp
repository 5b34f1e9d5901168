// Acceptance gate: runs the six top-level criteria and prints one
// [PASS]/[FAIL] line per criterion.  Exit 0 iff all pass.
#include <cstdio>
#include <exception>

#include "hermlab/verify.hpp"

int main() {
    bool all = true;
    try {
        for (const auto& r : hermlab::verify::run_suite("all")) {
            std::printf("%s\n", hermlab::verify::format_line(r).c_str());
            if (!r.passed) {
                for (const auto& line : hermlab::verify::format_checks(r))
                    std::printf("%s\n", line.c_str());
                all = false;
            }
        }
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance run aborted: %s\n", e.what());
        return 1;
    }
    return all ? 0 : 1;
}
