// verify.hpp
// The oracle-verification suite: every closed-form result is checked
// against an independent computation route (state-vector projection,
// eigendecomposition, mixtures) at fixed tolerances. No Monte Carlo here;
// the suite is deterministic and fast.

#pragma once

#include <string>
#include <vector>

namespace kaonsim {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // worst residual or the first failure found
};

std::vector<CheckResult> run_verification();

bool all_passed(const std::vector<CheckResult>& results);

// Fixed-width pass/fail table for terminal output.
std::string render_check_table(const std::vector<CheckResult>& results);

}  // namespace kaonsim
