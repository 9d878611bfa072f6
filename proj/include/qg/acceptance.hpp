#ifndef QG_ACCEPTANCE_HPP
#define QG_ACCEPTANCE_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace qg {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the full verification suite (closed forms, symbolic polynomials,
/// unitarity, energy identity, counting statistics, branch structure).
/// When `progress` is non-null a PASS/FAIL line is streamed per criterion.
std::vector<CriterionResult> run_acceptance(std::ostream* progress = nullptr, int threads = 0);

/// True iff every criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

} // namespace qg

#endif
