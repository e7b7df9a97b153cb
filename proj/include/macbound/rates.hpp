#pragma once

#include <utility>
#include <vector>

namespace macbound::rates {

/// Divergence growth assumption E KL <= O(m^gamma)/Theta(n), optionally
/// with empirical loss decaying as O(n^-epsilon).
struct RateAssumption {
    double gamma;
    double epsilon;  // > 0 when meaningful; ignored by the slow-rate row

    RateAssumption(double gamma_, double epsilon_ = 0.0);
};

/// Power of n in a rate bound; rates are kept symbolic as
/// (exponent, log-factor) pairs since the hidden constants are unknown.
struct RateResult {
    double exponent;
    bool log_factor;
    double alpha_used;
};

/// Slow-rate row: gen = O(n^{(alpha (gamma - 1) - 1)/2}) for block size
/// m = Theta(n^alpha).
RateResult gen_rate_exponent(double gamma, double alpha);

/// Optimal block-growth exponent: 1 when gamma < 1, else 0.
double optimal_alpha(double gamma);

struct FastRateResult {
    double kl_term_exponent;   // alpha (gamma - 1) - 1
    RateResult residual;       // n^-epsilon with a log factor
};

/// Fast-rate row available when the empirical loss itself decays.
FastRateResult fast_rate_exponents(double gamma, double alpha, double epsilon);

/// Explicit intermediate bound behind the kl-to-difference conversion:
/// if kl(r, s) <= x and r <= 1/2 then s <= 2x - (r/2) log r + r + r^2
/// (with the 0 log 0 = 0 convention).
double lemma3_upper(double r, double x);

struct PowerLawFit {
    double slope;
    double intercept;
    double r_squared;
};

/// Least-squares fit of log(value) against log(n); at least 3 points with
/// distinct n and positive values.
PowerLawFit empirical_rate_fit(
    const std::vector<std::pair<long long, double>>& points);

}  // namespace macbound::rates
