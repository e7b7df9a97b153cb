#include "macbound/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "macbound/rng.hpp"

namespace macbound::counterexample {

namespace {

CounterexampleParams derive(long long n, long long m, std::uint64_t universe) {
    if (n < 4) throw std::invalid_argument("params_from_n: n must be >= 4");
    if (m < 1 || n % m != 0)
        throw std::invalid_argument("params_from_n: m must divide n");
    if (2 * m > n)
        throw std::invalid_argument("params_from_n: m must be at most n/2");

    CounterexampleParams p;
    p.n = n;
    p.m = m;
    p.universe_size = universe;
    p.alpha = std::exp(-static_cast<double>(m) / n);
    p.lambda = std::sqrt(static_cast<double>(n));

    // Region size R = nearest positive integer to K^m / (n ln n), held as
    // base-K digits so arbitrarily large m never needs big integers. The
    // digits come from long division: K^m is 1 followed by m zeros in base K.
    const double n_log_n = n * std::log(static_cast<double>(n));
    const double kd = static_cast<double>(universe);
    std::vector<std::uint64_t> digits(static_cast<std::size_t>(m), 0);
    double rem = 1.0;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        rem *= kd;
        double q = std::floor(rem / n_log_n);
        if (q > kd - 1.0) q = kd - 1.0;
        double next = rem - q * n_log_n;
        if (next < 0.0 && q >= 1.0) {  // guard against division roundoff
            q -= 1.0;
            next += n_log_n;
        }
        digits[i] = static_cast<std::uint64_t>(q);
        rem = next;
    }
    if (rem >= 0.5 * n_log_n) {  // round half up
        for (std::size_t i = digits.size(); i-- > 0;) {
            if (digits[i] + 1 < universe) {
                ++digits[i];
                break;
            }
            digits[i] = 0;
            if (i == 0) digits.clear();  // carried past the top: whole cube
        }
    }
    bool all_zero = !digits.empty();
    for (std::uint64_t d : digits)
        if (d != 0) all_zero = false;
    if (all_zero) digits.back() = 1;  // region_count >= 1

    if (digits.empty()) {
        p.phi = 1.0;
    } else {
        double phi = 0.0;
        for (std::size_t i = digits.size(); i-- > 0;)
            phi = (phi + static_cast<double>(digits[i])) / kd;
        p.phi = phi;
    }

    // Convenience scalar; saturates when the exact count needs > 64 bits.
    std::uint64_t rc = digits.empty() ? 1 : 0;
    bool saturated = false;
    for (std::uint64_t d : digits) {
        if (rc > (std::numeric_limits<std::uint64_t>::max() - d) / universe) {
            saturated = true;
            break;
        }
        rc = rc * universe + d;
    }
    p.region_count = saturated ? std::numeric_limits<std::uint64_t>::max() : rc;
    p.region_digits = std::move(digits);
    return p;
}

void check_sample_values(std::span<const std::uint64_t> values,
                         const CounterexampleParams& params) {
    for (std::uint64_t z : values)
        if (z < 1 || z > params.universe_size)
            throw std::invalid_argument("sample value outside [1, K]");
}

}  // namespace

CounterexampleParams params_from_n(long long n, long long m) {
    const double k = std::ceil(3.0 * n * std::log(static_cast<double>(n)));
    return derive(n, m, static_cast<std::uint64_t>(k));
}

CounterexampleParams params_from_n(long long n, long long m,
                                   std::uint64_t universe_override) {
    if (universe_override < 1)
        throw std::invalid_argument("params_from_n: K override must be >= 1");
    return derive(n, m, universe_override);
}

bool in_overfit_region(std::span<const std::uint64_t> block,
                       const CounterexampleParams& params) {
    if (static_cast<long long>(block.size()) != params.m)
        throw std::invalid_argument("in_overfit_region: block must have m entries");
    check_sample_values(block, params);
    if (params.region_digits.empty()) return true;  // region covers everything
    // rank(block) < region_count iff the digit vector (z_i - 1) is
    // lexicographically below the digit representation of region_count.
    for (std::size_t i = 0; i < block.size(); ++i) {
        const std::uint64_t digit = block[i] - 1;
        if (digit < params.region_digits[i]) return true;
        if (digit > params.region_digits[i]) return false;
    }
    return false;  // equal rank == region_count, first excluded tuple
}

Hypothesis run_algorithm(std::span<const std::uint64_t> sample,
                         const CounterexampleParams& params) {
    if (static_cast<long long>(sample.size()) != params.n)
        throw std::invalid_argument("run_algorithm: sample must have n entries");
    check_sample_values(sample, params);
    if (!in_overfit_region(sample.subspan(0, static_cast<std::size_t>(params.m)),
                           params))
        return Hypothesis::AllZeros();
    Hypothesis h{false, {sample.begin() + params.m, sample.end()}};
    std::sort(h.zero_points.begin(), h.zero_points.end());
    h.zero_points.erase(std::unique(h.zero_points.begin(), h.zero_points.end()),
                        h.zero_points.end());
    return h;
}

double empirical_loss(const Hypothesis& h, std::span<const std::uint64_t> sample,
                      const CounterexampleParams& params) {
    if (h.all_zeros) return 0.0;
    check_sample_values(sample, params);
    long long ones = 0;
    for (std::uint64_t z : sample)
        if (!std::binary_search(h.zero_points.begin(), h.zero_points.end(), z))
            ++ones;
    return static_cast<double>(ones) / static_cast<double>(sample.size());
}

double population_loss_exact(const Hypothesis& h, const CounterexampleParams& params) {
    if (h.all_zeros) return 0.0;
    return static_cast<double>(params.universe_size - h.zero_points.size()) /
           static_cast<double>(params.universe_size);
}

double divergence_block1_overfit(const CounterexampleParams& params) {
    return -std::log1p(-params.alpha);
}

double divergence_block1_normal(const CounterexampleParams& params) {
    return static_cast<double>(params.m) / static_cast<double>(params.n);
}

double divergence_blockj_upper(const CounterexampleParams& params) {
    return divergence_block1_normal(params) +
           params.phi * params.m * std::log(static_cast<double>(params.universe_size)) +
           params.phi * divergence_block1_overfit(params);
}

double divergence_sum_upper(const CounterexampleParams& params) {
    const double log_one_minus_alpha_inv = divergence_block1_overfit(params);
    const double blocks = static_cast<double>(params.n) / params.m;
    return params.phi * log_one_minus_alpha_inv +
           blocks * divergence_block1_normal(params) +
           params.n * params.phi * std::log(static_cast<double>(params.universe_size)) +
           blocks * params.phi * log_one_minus_alpha_inv;
}

double rhs_bound(const CounterexampleParams& params) {
    const double sqrt_n = std::sqrt(static_cast<double>(params.n));
    return 1.0 / (8.0 * sqrt_n) + divergence_sum_upper(params) / sqrt_n;
}

double rhs_final_constant(long long n, long long) {
    const double nd = static_cast<double>(n);
    const double log_n = std::log(nd);
    return 17.0 / 8.0 + std::log(nd + 1.0) / (nd * log_n) +
           (std::log(nd + 1.0) + std::log(3.0)) / log_n + std::log(log_n) / log_n;
}

double overfit_gap_lower(long long n, long long m) {
    const double nd = static_cast<double>(n);
    return (1.0 - m / nd) * (1.0 - 1.0 / (3.0 * std::log(nd)));
}

double instantaneous_divergence_upper(long long n, long long m) {
    const double nd = static_cast<double>(n), md = static_cast<double>(m);
    const double log_n = std::log(nd);
    return std::log(nd + md) - std::log(md) + 2.0 + std::log(3.0) / log_n +
           std::log(log_n) / log_n + std::log((nd + md) / md) / (nd * log_n);
}

SimulationReport mc_simulate(const CounterexampleParams& params, long long trials,
                             std::uint64_t seed) {
    if (trials < 1)
        throw std::invalid_argument("mc_simulate: trials must be >= 1");

    struct ChunkStats {
        long long overfit = 0;
        double gap_sum = 0.0;
        double gap_min = std::numeric_limits<double>::infinity();
    };
    constexpr std::int64_t kChunk = 1024;
    std::vector<ChunkStats> chunks((trials + kChunk - 1) / kChunk);

    rng::parallel_chunks(trials, kChunk, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        std::vector<std::uint64_t> sample(static_cast<std::size_t>(params.n));
        for (std::int64_t i = b; i < e; ++i) {
            rng::SplitMix64 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(i)));
            for (auto& z : sample) z = gen.uniform_int(params.universe_size) + 1;
            const Hypothesis h = run_algorithm(sample, params);
            if (h.all_zeros) continue;  // zero loss everywhere, zero gap
            const double gap = population_loss_exact(h, params) -
                               empirical_loss(h, sample, params);
            auto& s = chunks[c];
            ++s.overfit;
            s.gap_sum += gap;
            s.gap_min = std::min(s.gap_min, gap);
        }
    });

    SimulationReport report;
    report.trials = trials;
    report.overfit_trials = 0;
    double gap_sum = 0.0;
    double gap_min = std::numeric_limits<double>::infinity();
    for (const auto& s : chunks) {
        report.overfit_trials += s.overfit;
        gap_sum += s.gap_sum;
        gap_min = std::min(gap_min, s.gap_min);
    }
    report.overfit_frequency =
        static_cast<double>(report.overfit_trials) / static_cast<double>(trials);
    report.gen_mean = gap_sum / static_cast<double>(trials);
    if (report.overfit_trials > 0) {
        report.conditional_gap_min = gap_min;
        report.conditional_gap_mean = gap_sum / report.overfit_trials;
    }
    return report;
}

}  // namespace macbound::counterexample
