// validate.hpp — Named invariant checks run by `semigroup-lab validate`

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semigroup/io.hpp"

namespace semigroup {

struct CheckResult {
    std::string module;
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ValidationOptions {
    std::string filter;                       // module name; empty runs everything
    std::optional<double> tolerance_override; // replaces every check's tolerance
    std::uint64_t seed = 7;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool passed() const;
    Json to_json() const;
};

std::vector<std::string> validation_modules();

// Each check passes when measured ≤ tolerance. Throws DomainError for an unknown filter.
ValidationReport run_validation(const ValidationOptions& options);

} // namespace semigroup
