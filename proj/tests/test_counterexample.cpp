#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "macbound/counterexample.hpp"
#include "macbound/rng.hpp"

using namespace macbound::counterexample;

TEST_CASE("params_from_n: derived quantities") {
    const auto p = params_from_n(100, 1);
    CHECK(p.universe_size == 1382);  // ceil(300 ln 100)
    CHECK(p.alpha == doctest::Approx(std::exp(-0.01)).epsilon(1e-15));
    CHECK(p.region_count == 3);
    CHECK(p.phi == doctest::Approx(0.0021707670043415340).epsilon(1e-13));
    CHECK(p.lambda == doctest::Approx(10.0).epsilon(1e-15));
    // phi tracks 1/(n ln n) within the rounding slack.
    CHECK(p.phi == doctest::Approx(1.0 / (100.0 * std::log(100.0))).epsilon(0.35));

    const auto q = params_from_n(4, 2);
    CHECK(q.universe_size == 17);  // ceil(12 ln 4)
    CHECK(q.alpha == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(q.lambda == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(q.region_count ==
          static_cast<std::uint64_t>(std::llround(17.0 * 17.0 / (4.0 * std::log(4.0)))));
}

TEST_CASE("params_from_n: validation") {
    CHECK_THROWS_AS(params_from_n(100, 3), std::invalid_argument);   // m does not divide n
    CHECK_THROWS_AS(params_from_n(100, 51), std::invalid_argument);  // m > n/2
    CHECK_THROWS_AS(params_from_n(3, 1), std::invalid_argument);     // n < 4
    CHECK_THROWS_AS(params_from_n(100, 0), std::invalid_argument);
    CHECK_NOTHROW(params_from_n(100, 50));
}

TEST_CASE("in_overfit_region: lexicographic prefix semantics") {
    const auto p = params_from_n(100, 1);
    // m = 1: exactly the first region_count = 3 values of [K] are inside.
    std::uint64_t inside = 0;
    for (std::uint64_t v = 1; v <= p.universe_size; ++v) {
        const std::uint64_t block[1] = {v};
        if (in_overfit_region(block, p)) ++inside;
    }
    CHECK(inside == p.region_count);
    const std::uint64_t first[1] = {1}, third[1] = {3}, fourth[1] = {4};
    CHECK(in_overfit_region(first, p));
    CHECK(in_overfit_region(third, p));
    CHECK(!in_overfit_region(fourth, p));
}

TEST_CASE("in_overfit_region: exhaustive enumeration with a small universe") {
    const auto p = params_from_n(4, 2, 7);  // K = 7, K^m = 49 tuples
    const auto expected =
        static_cast<std::uint64_t>(std::llround(49.0 / (4.0 * std::log(4.0))));
    CHECK(p.region_count == expected);
    std::uint64_t inside = 0;
    std::uint64_t rank = 0;
    for (std::uint64_t a = 1; a <= 7; ++a) {
        for (std::uint64_t b = 1; b <= 7; ++b, ++rank) {
            const std::uint64_t block[2] = {a, b};
            const bool hit = in_overfit_region(block, p);
            // Membership is exactly "lexicographic rank < region_count".
            CHECK(hit == (rank < p.region_count));
            if (hit) ++inside;
        }
    }
    CHECK(inside == p.region_count);
}

TEST_CASE("run_algorithm and the exact losses") {
    const auto p = params_from_n(100, 1);
    std::vector<std::uint64_t> sample(100, 500);
    sample[0] = 4;  // outside the trigger region
    auto h = run_algorithm(sample, p);
    CHECK(h.all_zeros);
    CHECK(empirical_loss(h, sample, p) == 0.0);
    CHECK(population_loss_exact(h, p) == 0.0);

    sample[0] = 2;  // inside the trigger region
    for (std::size_t i = 1; i < sample.size(); ++i)
        sample[i] = 100 + static_cast<std::uint64_t>(i);
    h = run_algorithm(sample, p);
    CHECK(!h.all_zeros);
    CHECK(std::is_sorted(h.zero_points.begin(), h.zero_points.end()));
    CHECK(h.zero_points.size() == 99);  // tail points, deduplicated
    // The overfit hypothesis nails its own tail but misses the trigger point.
    CHECK(empirical_loss(h, sample, p) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(population_loss_exact(h, p) ==
          doctest::Approx((1382.0 - 99.0) / 1382.0).epsilon(1e-15));

    // Duplicated tail points shrink the zero set, never grow it.
    std::fill(sample.begin() + 1, sample.end(), 777);
    sample[0] = 1;
    h = run_algorithm(sample, p);
    CHECK(!h.all_zeros);
    CHECK(h.zero_points.size() == 1);
    CHECK(h.zero_points[0] == 777);
    CHECK(population_loss_exact(h, p) ==
          doctest::Approx(1381.0 / 1382.0).epsilon(1e-15));

    // Brute-force recomputation of the empirical loss.
    double brute = 0.0;
    for (const auto z : sample)
        brute += std::binary_search(h.zero_points.begin(), h.zero_points.end(), z)
                     ? 0.0
                     : 1.0;
    brute /= static_cast<double>(sample.size());
    CHECK(empirical_loss(h, sample, p) == doctest::Approx(brute).epsilon(1e-15));
}

TEST_CASE("divergence terms: frozen values") {
    const auto p100 = params_from_n(100, 1);
    CHECK(divergence_block1_overfit(p100) ==
          doctest::Approx(4.6101660193248969).epsilon(1e-12));
    CHECK(divergence_block1_normal(p100) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(divergence_blockj_upper(p100) ==
          doctest::Approx(0.035705035507205164).epsilon(1e-12));
    CHECK(divergence_sum_upper(p100) ==
          doctest::Approx(3.5805111469998034).epsilon(1e-12));
    CHECK(rhs_bound(p100) == doctest::Approx(0.37055111469998034).epsilon(1e-12));

    const auto p4 = params_from_n(4, 2);
    CHECK(divergence_block1_overfit(p4) ==
          doctest::Approx(0.93275212956718857).epsilon(1e-12));
    CHECK(divergence_block1_normal(p4) == doctest::Approx(0.5).epsilon(1e-15));

    // The normal-event divergence is -log(alpha) up to roundoff.
    CHECK(std::abs(divergence_block1_normal(p100) + std::log(p100.alpha)) < 1e-15);

    // alpha -> 0 limit of the overfit term (formula-level check).
    auto small = p100;
    small.alpha = 1e-12;
    CHECK(divergence_block1_overfit(small) == doctest::Approx(1e-12).epsilon(1e-6));

    // phi = 0 collapses the generic-block upper bound to the normal term.
    auto nophi = p100;
    nophi.phi = 0.0;
    CHECK(divergence_blockj_upper(nophi) ==
          doctest::Approx(divergence_block1_normal(p100)).epsilon(1e-15));
}

TEST_CASE("rhs constants and gap bounds") {
    CHECK(rhs_final_constant(16, 1) ==
          doctest::Approx(3.9747813491511860).epsilon(1e-12));
    CHECK(overfit_gap_lower(100, 1) ==
          doctest::Approx(0.91834141048596345).epsilon(1e-12));
    CHECK(instantaneous_divergence_upper(100, 1) ==
          doctest::Approx(7.1953255932517261).epsilon(1e-12));

    // sqrt(n) * rhs_bound stays below the bracketed constant on a dyadic grid.
    for (long long n = 16; n <= (1LL << 20); n *= 4) {
        const auto p = params_from_n(n, 1);
        CHECK(std::sqrt(static_cast<double>(n)) * rhs_bound(p) <=
              rhs_final_constant(n, 1) + 1e-12);
    }
    // The constant itself is nonincreasing in n.
    double prev = rhs_final_constant(16, 1);
    for (long long n = 64; n <= (1LL << 20); n *= 4) {
        const double cur = rhs_final_constant(n, 1);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    // rhs_bound decays like 1/sqrt(n): quadrupling n at least halves it
    // modulo the log factor.
    for (long long n : {10000LL, 20000LL, 100000LL}) {
        CHECK(rhs_bound(params_from_n(4 * n, 1)) <
              0.6 * rhs_bound(params_from_n(n, 1)));
    }
    // The pointwise gap bound approaches 1 from below.
    prev = overfit_gap_lower(100, 1);
    for (long long n = 400; n <= 1000000; n *= 4) {
        const double cur = overfit_gap_lower(n, 1);
        CHECK(cur > prev);
        CHECK(cur < 1.0);
        prev = cur;
    }
    // Instantaneous divergence with m = n/2 settles near log 3 + 2.
    CHECK(instantaneous_divergence_upper(1 << 20, 1 << 19) ==
          doctest::Approx(std::log(3.0) + 2.0).epsilon(0.15));
    // Relative to log n it shrinks: the realized divergence is O(log n).
    double ratio_prev = instantaneous_divergence_upper(1 << 7, 1) / std::log(1 << 7);
    for (int e = 9; e <= 20; e += 2) {
        const long long n = 1LL << e;
        const double ratio =
            instantaneous_divergence_upper(n, 1) / std::log(static_cast<double>(n));
        CHECK(ratio < ratio_prev);
        ratio_prev = ratio;
    }
}

TEST_CASE("mc_simulate: frequency, pointwise gap, determinism") {
    const auto p = params_from_n(16, 1);
    const long long trials = 20000;
    const auto rep = mc_simulate(p, trials, 2718);
    CHECK(rep.trials == trials);
    CHECK(rep.overfit_frequency ==
          doctest::Approx(static_cast<double>(rep.overfit_trials) / trials)
              .epsilon(1e-15));
    // Loose 5-sigma binomial band around phi.
    const double se = std::sqrt(p.phi * (1.0 - p.phi) / trials);
    CHECK(std::abs(rep.overfit_frequency - p.phi) < 5.0 * se);
    REQUIRE(rep.overfit_trials > 0);
    // Every overfit trial beats the pointwise gap lower bound.
    CHECK(rep.conditional_gap_min.value() >= overfit_gap_lower(16, 1));
    CHECK(rep.conditional_gap_mean.value() >= rep.conditional_gap_min.value());
    CHECK(rep.gen_mean >= 0.0);

    // Bitwise reproducibility for a fixed seed and across worker counts.
    const auto rep2 = mc_simulate(p, trials, 2718);
    CHECK(rep.overfit_trials == rep2.overfit_trials);
    CHECK(rep.gen_mean == rep2.gen_mean);
    CHECK(rep.conditional_gap_min.value() == rep2.conditional_gap_min.value());
    setenv("MACBOUND_THREADS", "1", 1);
    const auto one = mc_simulate(p, 5000, 99);
    setenv("MACBOUND_THREADS", "3", 1);
    const auto three = mc_simulate(p, 5000, 99);
    unsetenv("MACBOUND_THREADS");
    CHECK(one.overfit_trials == three.overfit_trials);
    CHECK(one.gen_mean == three.gen_mean);
    CHECK(one.overfit_frequency == three.overfit_frequency);
    if (one.conditional_gap_mean)
        CHECK(one.conditional_gap_mean.value() == three.conditional_gap_mean.value());
}

TEST_CASE("mc_simulate: zero overfit trials leave conditionals empty") {
    const auto p = params_from_n(100, 1);  // phi ~ 0.0022
    bool found = false;
    for (std::uint64_t seed = 0; seed < 200 && !found; ++seed) {
        const auto rep = mc_simulate(p, 10, seed);
        if (rep.overfit_trials == 0) {
            CHECK(!rep.conditional_gap_min.has_value());
            CHECK(!rep.conditional_gap_mean.has_value());
            CHECK(rep.overfit_frequency == 0.0);
            CHECK(rep.gen_mean == 0.0);
            found = true;
        }
    }
    CHECK(found);
}
