#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace macbound::counterexample {

/// Parameters of the overfitting scenario used to rule out block-sample
/// high-probability bounds. Sample values live in [1, K]; the first block
/// triggers overfitting when it falls in a region of probability phi.
struct CounterexampleParams {
    long long n;
    long long m;
    std::uint64_t universe_size;     // K = ceil(3 n ln n)
    double alpha;                    // exp(-m/n)
    // Nearest positive integer to K^m/(n ln n); saturates at the uint64 max
    // when the exact count needs more than 64 bits (region_digits is exact).
    std::uint64_t region_count;
    double phi;                      // region_count / K^m
    double lambda;                   // sqrt(n)
    // Mixed-radix digits (base K, most significant first) of region_count;
    // empty means the region covers all of [K]^m.
    std::vector<std::uint64_t> region_digits;
};

/// Derives all scenario parameters from (n, m). Requires m | n, m <= n/2,
/// n >= 4.
CounterexampleParams params_from_n(long long n, long long m);

/// Same derivation with an explicit K; intended for tests that need a
/// small enough universe for exhaustive region enumeration.
CounterexampleParams params_from_n(long long n, long long m,
                                   std::uint64_t universe_override);

/// Either the all-zeros hypothesis or the complement-overfit hypothesis
/// that is 0 exactly on its (deduplicated) zero points.
struct Hypothesis {
    bool all_zeros;
    std::vector<std::uint64_t> zero_points;  // sorted, unique

    static Hypothesis AllZeros() { return {true, {}}; }
};

/// True iff the block's lexicographic rank among [K]^m tuples is below
/// region_count. Digit-wise comparison; no large-integer arithmetic.
bool in_overfit_region(std::span<const std::uint64_t> block,
                       const CounterexampleParams& params);

/// The (deterministic) learning algorithm: overfit to the tail points when
/// the first block lies in the trigger region, otherwise output all-zeros.
Hypothesis run_algorithm(std::span<const std::uint64_t> sample,
                         const CounterexampleParams& params);

/// Fraction of sample points scored 1 by the hypothesis.
double empirical_loss(const Hypothesis& h, std::span<const std::uint64_t> sample,
                      const CounterexampleParams& params);

/// Exact population loss: 0 for all-zeros, (K - |zero_points|)/K otherwise.
double population_loss_exact(const Hypothesis& h, const CounterexampleParams& params);

/// Realized KL of the first-block posterior against the prior, on the
/// overfit event: log(1/(1 - alpha)).
double divergence_block1_overfit(const CounterexampleParams& params);

/// Same off the overfit event: log(1/alpha) = m/n.
double divergence_block1_normal(const CounterexampleParams& params);

/// Upper bound on the realized KL for any block j >= 2:
/// log(1/alpha) + phi m log K + phi log(1/(1 - alpha)).
double divergence_blockj_upper(const CounterexampleParams& params);

/// Upper bound on sum_j E KL via total expectation over the trigger event.
double divergence_sum_upper(const CounterexampleParams& params);

/// Theorem-1 right-hand side at lambda = sqrt(n) with the Hoeffding
/// (1/4-subgaussian) envelope: 1/(8 sqrt(n)) + divergence_sum_upper/sqrt(n).
double rhs_bound(const CounterexampleParams& params);

/// Bracketed constant dominating sqrt(n) * rhs_bound:
/// 17/8 + log(n+1)/(n log n) + (log(n+1) + log 3)/log n + log log n / log n.
double rhs_final_constant(long long n, long long m);

/// Pointwise generalization gap on the overfit event:
/// at least (1 - m/n)(1 - 1/(3 log n)).
double overfit_gap_lower(long long n, long long m);

/// Upper bound on the realized sum of per-block divergences on the overfit
/// event; grows as O(log n).
double instantaneous_divergence_upper(long long n, long long m);

struct SimulationReport {
    long long trials;
    long long overfit_trials;
    double overfit_frequency;
    std::optional<double> conditional_gap_min;   // over overfit trials
    std::optional<double> conditional_gap_mean;
    double gen_mean;
};

/// End-to-end sampling of the scenario: uniform samples from [K]^n, the
/// algorithm above, exact losses. Reproducible for any worker count.
SimulationReport mc_simulate(const CounterexampleParams& params, long long trials,
                             std::uint64_t seed);

}  // namespace macbound::counterexample
