#include "macbound/comparators.hpp"

#include <cmath>

namespace macbound::comparators {

double catoni(double beta, UnitInterval r, UnitInterval s) {
    if (!(beta > 0.0))
        throw std::invalid_argument("catoni: beta must be > 0");
    // At s = 1 the log argument is e^-beta > 0, so this is always defined.
    return -std::log1p(std::expm1(-beta) * s.value()) - beta * r.value();
}

double binary_kl(UnitInterval r, UnitInterval s) {
    const double rv = r.value(), sv = s.value();
    double first = 0.0;
    if (rv > 0.0) {
        if (sv == 0.0) return kInfinity;
        first = rv * std::log(rv / sv);
    }
    double second = 0.0;
    if (rv < 1.0) {
        if (sv == 1.0) return kInfinity;
        second = (1.0 - rv) * std::log((1.0 - rv) / (1.0 - sv));
    }
    return first + second;
}

double difference(double r, double s) { return s - r; }

namespace {

// Golden-section maximization of a concave objective on [lo, hi].
template <typename F>
double golden_max(F f, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 200 && (b - a) > 1e-12 * (1.0 + b); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
    }
    return std::max(f1, f2);
}

}  // namespace

double kl_sup_over_beta(UnitInterval r, UnitInterval s) {
    double rv = r.value(), sv = s.value();
    const double klval = binary_kl(r, s);
    if (std::isinf(klval)) return klval;
    // Near the boundary of the square the wide fixed bracket is unreliable;
    // the sup identity gives binary_kl there anyway.
    constexpr double kEdge = 1e-6;
    if (rv < kEdge || rv > 1.0 - kEdge || sv < kEdge || sv > 1.0 - kEdge)
        return klval;
    if (rv == sv) return 0.0;
    // The supremum is attained at positive beta only when s > r. For s < r
    // use kl(r,s) = kl(1-r,1-s) and search the reflected pair instead.
    if (sv < rv) { rv = 1.0 - rv; sv = 1.0 - sv; }
    auto objective = [rv, sv](double beta) { return catoni(beta, rv, sv); };
    return golden_max(objective, 1e-8, 50.0);
}

double kl_inverse_upper(UnitInterval r, double c) {
    if (c < 0.0) throw std::invalid_argument("kl_inverse_upper: c must be >= 0");
    const double rv = r.value();
    if (std::isinf(c)) return 1.0;
    if (c == 0.0 || rv == 1.0) return rv == 1.0 ? 1.0 : rv;
    // binary_kl(r, .) is strictly increasing on [r, 1) and diverges as
    // s -> 1, so a root of kl(r,s) = c is bracketed. Bisect in
    // t = -log(1 - s); there the slope of kl is (s - r)/s <= 1, which keeps
    // the kl residual at the returned point within the bisection tolerance
    // even when s is extremely close to 1.
    auto kl_of_t = [rv](double t) {
        const double one_minus_s = std::exp(-t);
        const double s = 1.0 - one_minus_s;
        double first = 0.0;
        if (rv > 0.0) first = rv * std::log(rv / s);
        return first + (1.0 - rv) * (std::log(1.0 - rv) + t);
    };
    double t_lo = -std::log1p(-rv);
    double t_hi = t_lo + 1.0;
    while (kl_of_t(t_hi) < c) t_hi = 2.0 * t_hi + 1.0;
    for (int i = 0; i < 200 && (t_hi - t_lo) > 1e-14 * (1.0 + t_hi); ++i) {
        const double mid = 0.5 * (t_lo + t_hi);
        (kl_of_t(mid) <= c ? t_lo : t_hi) = mid;
    }
    return 1.0 - std::exp(-0.5 * (t_lo + t_hi));
}

double pinsker_upper(double klval) {
    if (klval < 0.0)
        throw std::invalid_argument("pinsker_upper: negative kl value");
    return 0.5 * std::sqrt(klval);
}

}  // namespace macbound::comparators
