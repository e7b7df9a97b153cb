#pragma once

#include <cstdint>

#include "macbound/comparators.hpp"

namespace macbound::gaussian_example {

using comparators::UnitInterval;

/// Gaussian mean estimation under the truncated square loss
/// min((w - z)^2, 1), with Z ~ N(mu, 1) and W the sample mean.
struct GaussianScenario {
    double mu;
    long long n;
    long long m;

    GaussianScenario(double mu_, long long n_, long long m_);
};

/// Block posterior / prior N(mean, variance); variance is (n-m)/n^2.
struct GaussianPosterior {
    double mean;
    double variance;
};

struct MonteCarloEstimate {
    double estimate;
    double std_error;
};

/// Posterior of W given one block with sum T_j:
/// N(mu (n-m)/n + T_j/n, (n-m)/n^2). Requires m < n.
GaussianPosterior block_posterior(const GaussianScenario& sc, double block_sum);

/// The prior N(mu, (n-m)/n^2) used for the closed-form divergence.
GaussianPosterior prior(const GaussianScenario& sc);

UnitInterval truncated_loss(double w, double z);

/// Exact population loss E min((w - Z)^2, 1) via the standard normal
/// cdf/pdf decomposition over the truncation window.
UnitInterval population_loss(double w, double mu);

/// Closed-form E KL(P_{W|S_j} || Q_W) = m / (2(n - m)); +infinity at m = n
/// (the original PAC-Bayes choice, vacuous for this deterministic algorithm).
double expected_block_divergence(const GaussianScenario& sc);

/// Closed-form generalization bound (1/2) sqrt(1 / (2(n - m))).
double example_gen_bound(const GaussianScenario& sc);

/// Monte Carlo estimate of the expected block divergence from draws of the
/// block sum; unbiased against the closed form. Rejects m = n.
MonteCarloEstimate mc_block_divergence(const GaussianScenario& sc, long long trials,
                                       std::uint64_t seed);

/// Monte Carlo estimate of the true generalization error
/// E[L(W) - Lhat(W, S)] over independent training sets.
MonteCarloEstimate mc_gen_error(const GaussianScenario& sc, long long trials,
                                std::uint64_t seed);

}  // namespace macbound::gaussian_example
