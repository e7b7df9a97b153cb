#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "macbound/gaussian_example.hpp"

using namespace macbound::gaussian_example;
constexpr double kInf = macbound::comparators::kInfinity;

namespace {

double integrand(double w, double mu, double z) {
    const double d = (w - z) * (w - z);
    const double loss = d < 1.0 ? d : 1.0;
    const double t = z - mu;
    return loss * std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI);
}

double simpson(double w, double mu, double a, double b, double fa, double fm,
               double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(double w, double mu, double a, double b, double fa, double fm,
                double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = integrand(w, mu, lm), frm = integrand(w, mu, rm);
    const double left = simpson(w, mu, a, m, fa, flm, fm);
    const double right = simpson(w, mu, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(w, mu, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive(w, mu, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Independent quadrature oracle for E min((w - Z)^2, 1), Z ~ N(mu, 1).
double population_loss_quadrature(double w, double mu) {
    const double a = mu - 12.0, b = mu + 12.0;
    // Split at the kinks w - 1 and w + 1 so Simpson sees smooth pieces.
    double knots[4] = {a, w - 1.0, w + 1.0, b};
    if (knots[1] < a) knots[1] = a;
    if (knots[2] > b) knots[2] = b;
    if (knots[2] < knots[1]) knots[2] = knots[1];
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double lo = knots[i], hi = knots[i + 1];
        if (hi <= lo) continue;
        const double mid = 0.5 * (lo + hi);
        const double flo = integrand(w, mu, lo), fmid = integrand(w, mu, mid),
                     fhi = integrand(w, mu, hi);
        total += adaptive(w, mu, lo, hi, flo, fmid, fhi,
                          simpson(w, mu, lo, hi, flo, fmid, fhi), 1e-13, 50);
    }
    return total;
}

}  // namespace

TEST_CASE("GaussianScenario validation") {
    CHECK_NOTHROW(GaussianScenario(0.5, 10, 2));
    CHECK_NOTHROW(GaussianScenario(0.5, 10, 10));
    CHECK_THROWS_AS(GaussianScenario(0.5, 10, 3), std::invalid_argument);
    CHECK_THROWS_AS(GaussianScenario(0.5, 10, 0), std::invalid_argument);
    CHECK_THROWS_AS(GaussianScenario(0.5, 0, 1), std::invalid_argument);
}

TEST_CASE("block posterior and prior") {
    const GaussianScenario sc(0.5, 100, 4);
    const auto post = block_posterior(sc, 2.0);  // T_j = 2
    CHECK(post.mean == doctest::Approx(0.5 * 96.0 / 100.0 + 2.0 / 100.0).epsilon(1e-15));
    CHECK(post.variance == doctest::Approx(96.0 / 10000.0).epsilon(1e-15));
    const auto pri = prior(sc);
    CHECK(pri.mean == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pri.variance == doctest::Approx(96.0 / 10000.0).epsilon(1e-15));
    CHECK_THROWS_AS(block_posterior(GaussianScenario(0.5, 4, 4), 1.0),
                    std::invalid_argument);
}

TEST_CASE("truncated_loss") {
    CHECK(truncated_loss(0.0, 0.0).value() == 0.0);
    CHECK(truncated_loss(0.0, 0.5).value() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(truncated_loss(0.0, 1.0).value() == 1.0);
    CHECK(truncated_loss(0.0, 37.0).value() == 1.0);
    CHECK(truncated_loss(2.0, -3.0).value() == 1.0);
}

TEST_CASE("population_loss: frozen values") {
    CHECK(population_loss(0.5, 0.5).value() ==
          doctest::Approx(0.51605855096171330).epsilon(1e-11));
    CHECK(population_loss(1.5, 0.5).value() ==
          doctest::Approx(0.67936530724895540).epsilon(1e-11));
    CHECK(population_loss(10.5, 0.5).value() > 1.0 - 1e-10);
    CHECK(population_loss(-9.5, 0.5).value() > 1.0 - 1e-10);
}

TEST_CASE("population_loss agrees with quadrature across offsets") {
    for (double mu : {0.0, 0.5, -1.25}) {
        for (int k = -20; k <= 20; ++k) {
            const double delta = k * 0.25;
            const double exact = population_loss(mu + delta, mu).value();
            const double quad = population_loss_quadrature(mu + delta, mu);
            CHECK(exact == doctest::Approx(quad).epsilon(1e-9));
            CHECK(std::abs(exact - quad) < 1e-10);
        }
    }
}

TEST_CASE("population_loss monotone in |w - mu| and mu-invariant") {
    double prev = population_loss(0.5, 0.5).value();
    for (int k = 1; k <= 30; ++k) {
        const double cur = population_loss(0.5 + 0.2 * k, 0.5).value();
        CHECK(cur >= prev);
        prev = cur;
    }
    for (double delta : {0.0, 0.7, -2.3}) {
        const double a = population_loss(0.1 + delta, 0.1).value();
        const double b = population_loss(0.9 + delta, 0.9).value();
        CHECK(a == doctest::Approx(b).epsilon(1e-14));
    }
}

TEST_CASE("expected_block_divergence and example_gen_bound") {
    CHECK(expected_block_divergence(GaussianScenario(0.5, 100, 1)) ==
          doctest::Approx(1.0 / 198.0).epsilon(1e-15));
    CHECK(expected_block_divergence(GaussianScenario(0.5, 100, 50)) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(expected_block_divergence(GaussianScenario(0.5, 100, 100)) == kInf);
    CHECK(example_gen_bound(GaussianScenario(0.5, 2, 1)) ==
          doctest::Approx(0.35355339059327376).epsilon(1e-13));
    CHECK(example_gen_bound(GaussianScenario(0.5, 100, 1)) ==
          doctest::Approx(0.035533452725935072).epsilon(1e-13));
    CHECK(example_gen_bound(GaussianScenario(0.5, 100, 100)) == kInf);
    // The bound does not depend on the true mean.
    CHECK(example_gen_bound(GaussianScenario(0.1, 64, 4)) ==
          example_gen_bound(GaussianScenario(0.9, 64, 4)));
    // Smaller blocks and larger samples give tighter bounds.
    CHECK(example_gen_bound(GaussianScenario(0.5, 64, 1)) <
          example_gen_bound(GaussianScenario(0.5, 64, 8)));
    CHECK(example_gen_bound(GaussianScenario(0.5, 128, 1)) <
          example_gen_bound(GaussianScenario(0.5, 64, 1)));
}

TEST_CASE("mc_block_divergence matches the closed form") {
    struct Case { long long n, m; };
    for (const Case c : {Case{10, 1}, Case{100, 1}, Case{100, 50},
                         Case{1000, 100}, Case{1000, 500}}) {
        const GaussianScenario sc(0.5, c.n, c.m);
        const auto est = mc_block_divergence(sc, 100000, 42);
        const double exact = expected_block_divergence(sc);
        CHECK(est.std_error > 0.0);
        CHECK(std::abs(est.estimate - exact) < 4.0 * est.std_error);
    }
    CHECK_THROWS_AS(mc_block_divergence(GaussianScenario(0.5, 4, 4), 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_block_divergence(GaussianScenario(0.5, 4, 2), 0, 1),
                    std::invalid_argument);
    const auto one = mc_block_divergence(GaussianScenario(0.5, 4, 2), 1, 3);
    CHECK(one.estimate >= 0.0);
}

TEST_CASE("mc_gen_error sits under the closed-form bound") {
    const GaussianScenario sc(0.5, 50, 1);
    const auto est = mc_gen_error(sc, 10000, 7);
    CHECK(est.std_error > 0.0);
    CHECK(est.estimate <= example_gen_bound(sc) + 4.0 * est.std_error);
    CHECK(est.estimate >= -4.0 * est.std_error);
    // n = 1: W = Z_1 and the empirical loss is 0, so the gap is positive.
    const auto tiny = mc_gen_error(GaussianScenario(0.5, 1, 1), 200, 11);
    CHECK(tiny.estimate > 0.0);
}

TEST_CASE("monte carlo determinism across seeds and workers") {
    const GaussianScenario sc(0.5, 40, 2);
    const auto a = mc_block_divergence(sc, 20000, 123);
    const auto b = mc_block_divergence(sc, 20000, 123);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    const auto c = mc_block_divergence(sc, 20000, 124);
    CHECK(a.estimate != c.estimate);

    setenv("MACBOUND_THREADS", "1", 1);
    const auto single = mc_gen_error(sc, 5000, 9);
    setenv("MACBOUND_THREADS", "4", 1);
    const auto quad = mc_gen_error(sc, 5000, 9);
    unsetenv("MACBOUND_THREADS");
    CHECK(single.estimate == quad.estimate);
    CHECK(single.std_error == quad.std_error);
}
