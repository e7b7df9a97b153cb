#pragma once

#include <limits>
#include <stdexcept>

namespace macbound::comparators {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A real number validated to lie in [0, 1].
class UnitInterval {
public:
    UnitInterval(double v) : value_(v) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("UnitInterval: value outside [0,1]");
    }
    operator double() const { return value_; }
    double value() const { return value_; }

private:
    double value_;
};

enum class ComparatorTag { catoni, binary_kl, difference };

/// Selects which comparator d(r,s) is in play. beta is only meaningful
/// for the Catoni comparator and must be positive there.
struct ComparatorKind {
    ComparatorTag tag;
    double beta;

    static ComparatorKind Catoni(double beta) {
        if (!(beta > 0.0))
            throw std::invalid_argument("ComparatorKind: beta must be > 0");
        return {ComparatorTag::catoni, beta};
    }
    static ComparatorKind BinaryKl() { return {ComparatorTag::binary_kl, 0.0}; }
    static ComparatorKind Difference() { return {ComparatorTag::difference, 0.0}; }
};

/// Catoni comparator C_beta(r,s) = -log(1 - (1 - e^-beta) s) - beta r.
/// Natural logarithm; defined for all r,s in [0,1] and beta > 0.
double catoni(double beta, UnitInterval r, UnitInterval s);

/// Binary relative entropy r log(r/s) + (1-r) log((1-r)/(1-s)) with the
/// 0 log 0 = 0 convention. Returns +infinity iff (s=0, r>0) or (s=1, r<1);
/// an infinite value signals absolute-continuity failure, not an error.
double binary_kl(UnitInterval r, UnitInterval s);

/// The difference comparator s - r.
double difference(double r, double s);

/// Evaluates sup over beta > 0 of catoni(beta, r, s) numerically.
/// Agrees with binary_kl(r, s) within tolerance; +infinity cases are
/// passed through from binary_kl rather than searched.
double kl_sup_over_beta(UnitInterval r, UnitInterval s);

/// Largest s in [r, 1) with binary_kl(r, s) <= c, or 1 when even s just
/// below 1 stays within the budget (including c = +infinity). Root-found in
/// t = -log(1-s), where the bisection tolerance translates into a relative
/// error of ~1e-14 in 1-s. The kl residual at the result is below 1e-10
/// whenever s <= 1 - 1e-5; closer to 1 the spacing of doubles itself moves
/// kl by more than that, and the result is accurate to an ulp of s instead.
double kl_inverse_upper(UnitInterval r, double c);

/// Pinsker step: bound (1/2) sqrt(kl) on the difference of the arguments.
double pinsker_upper(double klval);

}  // namespace macbound::comparators
