// Acceptance suite runner: one PASS/FAIL line per criterion, nonzero exit on
// any failure.

#include <iostream>

#include "qg/acceptance.hpp"

int main() {
    auto results = qg::run_acceptance(&std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;
    if (failed) {
        std::cout << failed << " criterion(s) FAILED\n";
        return 1;
    }
    std::cout << "all " << results.size() << " criteria passed\n";
    return 0;
}
