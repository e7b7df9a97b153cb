#include "macbound/rates.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace macbound::rates {

namespace {

void check_gamma_alpha(double gamma, double alpha) {
    if (!(gamma >= 0.0))
        throw std::invalid_argument("rates: gamma must be >= 0");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("rates: alpha must be in [0,1]");
}

}  // namespace

RateAssumption::RateAssumption(double gamma_, double epsilon_)
    : gamma(gamma_), epsilon(epsilon_) {
    if (!(gamma >= 0.0))
        throw std::invalid_argument("RateAssumption: gamma must be >= 0");
    if (epsilon != 0.0 && !(epsilon > 0.0))
        throw std::invalid_argument("RateAssumption: epsilon must be > 0 when set");
}

RateResult gen_rate_exponent(double gamma, double alpha) {
    check_gamma_alpha(gamma, alpha);
    return {(alpha * (gamma - 1.0) - 1.0) / 2.0, false, alpha};
}

double optimal_alpha(double gamma) {
    if (!(gamma >= 0.0))
        throw std::invalid_argument("optimal_alpha: gamma must be >= 0");
    return gamma < 1.0 ? 1.0 : 0.0;
}

FastRateResult fast_rate_exponents(double gamma, double alpha, double epsilon) {
    check_gamma_alpha(gamma, alpha);
    if (!(epsilon > 0.0))
        throw std::invalid_argument("fast_rate_exponents: epsilon must be > 0");
    return {alpha * (gamma - 1.0) - 1.0, {-epsilon, true, alpha}};
}

double lemma3_upper(double r, double x) {
    if (!(r >= 0.0 && r <= 0.5))
        throw std::invalid_argument("lemma3_upper: r must be in [0, 1/2]");
    if (!(x >= 0.0))
        throw std::invalid_argument("lemma3_upper: x must be >= 0");
    const double log_term = r == 0.0 ? 0.0 : -(r / 2.0) * std::log(r);
    return 2.0 * x + log_term + r + r * r;
}

PowerLawFit empirical_rate_fit(
    const std::vector<std::pair<long long, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("empirical_rate_fit: need at least 3 points");
    std::set<long long> distinct;
    double sx = 0.0, sy = 0.0;
    for (const auto& [n, value] : points) {
        if (n < 1 || !(value > 0.0))
            throw std::invalid_argument(
                "empirical_rate_fit: need positive n and values");
        distinct.insert(n);
        sx += std::log(static_cast<double>(n));
        sy += std::log(value);
    }
    if (distinct.size() != points.size())
        throw std::invalid_argument("empirical_rate_fit: n values must be distinct");
    const double k = static_cast<double>(points.size());
    const double mean_x = sx / k, mean_y = sy / k;
    // Constant series short-circuit: a flat line fits perfectly, and the
    // centered sums below would otherwise divide rounding dust by itself.
    bool all_equal = true;
    for (const auto& [n, value] : points)
        if (value != points.front().second) all_equal = false;
    if (all_equal) return {0.0, mean_y, 1.0};
    // Centered second pass: a constant series yields var_y exactly 0.
    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (const auto& [n, value] : points) {
        const double dx = std::log(static_cast<double>(n)) - mean_x;
        const double dy = std::log(value) - mean_y;
        cov += dx * dy; var_x += dx * dx; var_y += dy * dy;
    }
    const double slope = cov / var_x;
    const double intercept = mean_y - slope * mean_x;
    const double r_squared = var_y == 0.0 ? 1.0 : cov * cov / (var_x * var_y);
    return {slope, intercept, r_squared};
}

}  // namespace macbound::rates
