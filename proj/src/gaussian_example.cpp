#include "macbound/gaussian_example.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "macbound/rng.hpp"

namespace macbound::gaussian_example {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }
double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

constexpr std::int64_t kChunk = 4096;

struct MomentAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
    }
};

MonteCarloEstimate reduce(const std::vector<MomentAccumulator>& chunks,
                          long long trials) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& c : chunks) {
        sum += c.sum;
        sum_sq += c.sum_sq;
    }
    const double mean = sum / trials;
    if (trials < 2) return {mean, 0.0};
    const double var = (sum_sq - trials * mean * mean) / (trials - 1.0);
    return {mean, std::sqrt(std::max(var, 0.0) / trials)};
}

}  // namespace

GaussianScenario::GaussianScenario(double mu_, long long n_, long long m_)
    : mu(mu_), n(n_), m(m_) {
    if (!(mu > 0.0 && mu < 1.0))
        throw std::invalid_argument("GaussianScenario: mu must be in (0,1)");
    if (n < 1 || m < 1 || m > n || n % m != 0)
        throw std::invalid_argument("GaussianScenario: m must divide n, 1 <= m <= n");
}

GaussianPosterior block_posterior(const GaussianScenario& sc, double block_sum) {
    if (sc.m == sc.n)
        throw std::invalid_argument("block_posterior: requires m < n");
    const double n = static_cast<double>(sc.n);
    return {sc.mu * (n - sc.m) / n + block_sum / n, (n - sc.m) / (n * n)};
}

GaussianPosterior prior(const GaussianScenario& sc) {
    if (sc.m == sc.n)
        throw std::invalid_argument("prior: requires m < n");
    const double n = static_cast<double>(sc.n);
    return {sc.mu, (n - sc.m) / (n * n)};
}

UnitInterval truncated_loss(double w, double z) {
    const double sq = (w - z) * (w - z);
    return sq < 1.0 ? sq : 1.0;
}

UnitInterval population_loss(double w, double mu) {
    // With D := w - Z ~ N(delta, 1), delta = w - mu:
    //   L(w) = P(|D| >= 1) + E[D^2 1{|D| < 1}].
    const double delta = w - mu;
    const double lo = -1.0 - delta, hi = 1.0 - delta;
    const double window = normal_cdf(hi) - normal_cdf(lo);
    const double second_moment =
        window + lo * normal_pdf(lo) - hi * normal_pdf(hi) +
        2.0 * delta * (normal_pdf(lo) - normal_pdf(hi)) + delta * delta * window;
    const double value = (1.0 - window) + second_moment;
    return std::min(std::max(value, 0.0), 1.0);
}

double expected_block_divergence(const GaussianScenario& sc) {
    if (sc.m == sc.n) return comparators::kInfinity;
    return static_cast<double>(sc.m) / (2.0 * (sc.n - sc.m));
}

double example_gen_bound(const GaussianScenario& sc) {
    if (sc.m == sc.n) return comparators::kInfinity;
    return 0.5 * std::sqrt(1.0 / (2.0 * (sc.n - sc.m)));
}

MonteCarloEstimate mc_block_divergence(const GaussianScenario& sc, long long trials,
                                       std::uint64_t seed) {
    if (sc.m == sc.n)
        throw std::invalid_argument("mc_block_divergence: m = n has no finite target");
    if (trials < 1)
        throw std::invalid_argument("mc_block_divergence: trials must be >= 1");
    const double scale = sc.m / (2.0 * (sc.n - sc.m));
    std::vector<MomentAccumulator> chunks((trials + kChunk - 1) / kChunk);
    rng::parallel_chunks(trials, kChunk, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            rng::SplitMix64 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(i)));
            // T_j - mu m = sqrt(m) G, so the per-sample divergence
            // n^2 (T_j/n - mu m/n)^2 / (2(n-m)) reduces to m G^2 / (2(n-m)).
            const double g = gen.normal();
            chunks[c].add(scale * g * g);
        }
    });
    return reduce(chunks, trials);
}

MonteCarloEstimate mc_gen_error(const GaussianScenario& sc, long long trials,
                                std::uint64_t seed) {
    if (trials < 1)
        throw std::invalid_argument("mc_gen_error: trials must be >= 1");
    std::vector<MomentAccumulator> chunks((trials + kChunk - 1) / kChunk);
    rng::parallel_chunks(trials, kChunk, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        std::vector<double> z(static_cast<std::size_t>(sc.n));
        for (std::int64_t i = b; i < e; ++i) {
            rng::SplitMix64 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(i)));
            double sum = 0.0;
            for (auto& zi : z) {
                zi = sc.mu + gen.normal();
                sum += zi;
            }
            const double w = sum / sc.n;
            double empirical = 0.0;
            for (double zi : z) empirical += truncated_loss(w, zi);
            empirical /= sc.n;
            chunks[c].add(population_loss(w, sc.mu) - empirical);
        }
    });
    return reduce(chunks, trials);
}

}  // namespace macbound::gaussian_example
