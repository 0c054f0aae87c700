#pragma once

#include <cstdint>
#include <vector>

namespace dss {

/// Timed comparison of the factorization work per coupling operation: one
/// n_j x n_j solve against the classical pair of one 2n_j x 2n_j and one
/// n_j x n_j solve, on random well-conditioned matrices.
struct BenchResult {
    int n_j = 0;
    double lmsss_mean_s = 0.0;
    double lmsss_median_s = 0.0;
    double classical_mean_s = 0.0;
    double classical_median_s = 0.0;
    double ratio = 0.0;  ///< classical_median_s / lmsss_median_s
};

struct BenchReport {
    int trials = 0;
    std::vector<BenchResult> results;
    /// Rank correlation between n_j and ratio; positive means the advantage
    /// grows with interface size.
    double spearman_rho = 0.0;
};

/// Runs `trials` timed repetitions per interface size after confirming the
/// instrumented factorization counts (1 vs 2) on a small coupling problem.
BenchReport bench_inversions(const std::vector<int>& n_js, int trials,
                             std::uint64_t seed = 1);

}  // namespace dss
