#pragma once

// Self-checks shared by `raqr validate` and the acceptance suite.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace raqr::validation {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct Report {
    std::vector<CheckResult> checks;

    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void append(const Report& other);
    [[nodiscard]] bool all_passed() const;
    [[nodiscard]] std::size_t failures() const;
    // One aligned line per check.
    void print(std::ostream& out) const;
    [[nodiscard]] std::string json() const;
};

// Two-sided KS critical value at level 1% (asymptotic, n large).
[[nodiscard]] double ks_critical_1pct(std::size_t n);

// Replays the reference-values CSV. A malformed or unreadable file is a
// failed check, not an exception.
Report reference_values(const std::filesystem::path& csv);

// Monotonicity grid, recurrence, inverse round trips, pdf normalization
// and rician_mean quadrature.
Report specfn_properties(std::uint64_t seed);

// KS of sample_rician against the Marcum CDF, `sets` parameter sets.
Report sampler_fidelity(std::uint64_t seed, int sets, std::size_t draws);

// Empirical FA / detection rates of both energy detectors against their
// closed forms on a (L, Lambda) grid, plus KS of 2T/sigma2 against the
// noncentral chi-square law for `ks_scenes` random scenes.
Report ed_exactness(std::uint64_t seed, std::size_t trials, int ks_scenes, std::size_t ks_trials);

}  // namespace raqr::validation
