#pragma once
// Self-verification suites shared by `pemscl selftest`, the unit tests and
// the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

namespace pemscl::verify {

inline constexpr double kGradientTolerance = 1e-4;
inline constexpr double kOracleTolerance = 1e-10;

struct SuiteResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // largest error observed (suite-specific metric)
    double seconds = 0.0;
    std::vector<std::string> notes;  // first few failure descriptions

    bool passed() const { return checks > 0 && failures == 0; }
    void record(bool ok, double error, const std::string& what);
};

/// Analytic vs central finite-difference gradients for every loss term, the
/// combined objectives and the encoder head. Error per configuration is
/// |g - g_fd|_2 / max(|g|_2, |g_fd|_2) (absolute when both norms are below
/// 1e-8).
SuiteResult run_gradient_checks(std::uint64_t seed = 1);

/// batch_loss against the direct-evaluation oracle on random tiny instances
/// (|R| <= 5, batch <= 6, d_x <= 8); relative difference of the total.
SuiteResult run_oracle_equivalence(std::uint64_t seed = 1, std::size_t instances = 100);

/// Property checks: label partitions, S-set symmetry, logit-shift
/// invariance, entropy bounds, permutation invariance of the contrastive
/// loss, metric identities, sampling contracts and best-epoch selection.
SuiteResult run_invariants(std::uint64_t seed = 1);

std::string summary_line(const SuiteResult& result);

}  // namespace pemscl::verify
