#pragma once

#include <optional>
#include <vector>

#include "macbound/comparators.hpp"

namespace macbound::bound_engine {

using comparators::ComparatorKind;
using comparators::kInfinity;
using comparators::UnitInterval;

/// A sample of size n split into J = n/m contiguous blocks of size m.
/// Construction rejects block sizes that do not divide n.
struct BlockPartition {
    long long n;
    long long m;

    BlockPartition(long long n_, long long m_);
    long long block_count() const { return n / m; }
};

/// Upper bound Phi_m on the exponential moment of the comparator applied
/// to an m-sample empirical loss. CatoniUnit and MaurerKl are point
/// envelopes established only at lambda' = m (values 1 and 2 sqrt(m));
/// the subgaussian envelope exp(sigma^2 lambda'^2 / (2m)) holds for all
/// lambda'.
struct MgfEnvelope {
    enum class Kind { catoni_unit, maurer_kl, subgaussian };

    Kind kind;
    double sigma_sq;

    static MgfEnvelope catoni_unit() { return {Kind::catoni_unit, 0.0}; }
    static MgfEnvelope maurer_kl() { return {Kind::maurer_kl, 0.0}; }
    static MgfEnvelope subgaussian(double sigma_sq);

    /// log Phi_m(lambda'). Rejects lambda' != m for the point envelopes.
    double log_phi(double lambda_prime, long long m) const;
    /// Upper end b of the valid lambda' domain.
    double domain_bound(long long m) const;
};

/// Per-block expected divergences E KL(P_{W|S_j} || Q_W); entries may be
/// +infinity (vacuous contributions are meaningful output, not errors).
struct DivergenceProfile {
    std::vector<double> per_block;

    static DivergenceProfile constant(long long block_count, double value) {
        return {std::vector<double>(static_cast<std::size_t>(block_count), value)};
    }
    double sum() const;
    bool has_infinite() const;
};

struct BoundReport {
    double value;
    ComparatorKind comparator;
    std::optional<double> lambda_used;
    bool finite;
};

/// General block-sample bound: [(n/m) log Phi_m(lambda m / n) + sum_j D_j] / lambda.
BoundReport theorem1_bound(const BlockPartition& part, const MgfEnvelope& env,
                           double lambda, const DivergenceProfile& div);

/// Bounded-loss Catoni right-hand side (sum_j D_j) / n. Serves both the
/// expected-Catoni bound and the kl-of-expectations bound.
double catoni_rhs(const BlockPartition& part, const DivergenceProfile& div);

/// Generalization bound sqrt((1/(4n)) sum_j D_j) for losses in [0,1].
double gen_bound_catoni(const BlockPartition& part, const DivergenceProfile& div);

/// Direct binary-kl substitution: log(2 sqrt(m))/m + (sum_j D_j)/n.
double kl_direct_bound(const BlockPartition& part, const DivergenceProfile& div);

/// Pinsker applied to kl_direct_bound; strictly looser than gen_bound_catoni.
double gen_bound_kl_direct(const BlockPartition& part, const DivergenceProfile& div);

struct SubgaussianBound {
    double bound;
    double lambda_star;
};

/// Subgaussian-loss bound sqrt((2 sigma^2 / n) sum_j D_j) together with the
/// optimizing lambda* = sqrt(2 n sum_j D_j / sigma^2).
SubgaussianBound gen_bound_subgaussian(const BlockPartition& part, double sigma_sq,
                                       const DivergenceProfile& div);

/// Markov step: with probability >= 1 - delta the comparator value is below
/// theorem1_value / delta (requires a nonnegative-valued comparator).
double markov_high_prob_bound(double theorem1_value, double delta);

/// Closed-form Bernoulli upper bound on the Catoni-comparator MGF:
/// (1 + p(e^{-beta lambda'/m} - 1))^m / (1 + p(e^{-beta} - 1))^{lambda'}.
/// Equals 1 exactly at lambda' = m.
double catoni_binomial_mgf(long long m, UnitInterval p, double beta,
                           double lambda_prime);

/// Exact enumeration of E exp(m kl(k/m, p)) for k ~ Binomial(m, p).
/// Capped at m <= 25; Maurer's bound says the value is at most 2 sqrt(m).
double binomial_kl_mgf(long long m, UnitInterval p);

}  // namespace macbound::bound_engine
