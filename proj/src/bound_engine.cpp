#include "macbound/bound_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace macbound::bound_engine {

BlockPartition::BlockPartition(long long n_, long long m_) : n(n_), m(m_) {
    if (n < 1 || m < 1 || m > n)
        throw std::invalid_argument("BlockPartition: need 1 <= m <= n");
    if (n % m != 0)
        throw std::invalid_argument("BlockPartition: m must divide n exactly");
}

MgfEnvelope MgfEnvelope::subgaussian(double sigma_sq) {
    if (!(sigma_sq > 0.0))
        throw std::invalid_argument("MgfEnvelope: sigma_sq must be > 0");
    return {Kind::subgaussian, sigma_sq};
}

double MgfEnvelope::log_phi(double lambda_prime, long long m) const {
    switch (kind) {
        case Kind::catoni_unit:
        case Kind::maurer_kl:
            if (std::abs(lambda_prime - static_cast<double>(m)) > 1e-9 * m)
                throw std::invalid_argument(
                    "MgfEnvelope: point envelope is only established at lambda' = m");
            return kind == Kind::catoni_unit
                       ? 0.0
                       : std::log(2.0 * std::sqrt(static_cast<double>(m)));
        case Kind::subgaussian:
            return sigma_sq * lambda_prime * lambda_prime / (2.0 * m);
    }
    throw std::logic_error("MgfEnvelope: unknown kind");
}

double MgfEnvelope::domain_bound(long long) const { return comparators::kInfinity; }

double DivergenceProfile::sum() const {
    double total = 0.0;
    for (double d : per_block) {
        if (d < 0.0)
            throw std::invalid_argument("DivergenceProfile: negative entry");
        total += d;
    }
    return total;
}

bool DivergenceProfile::has_infinite() const {
    for (double d : per_block)
        if (std::isinf(d)) return true;
    return false;
}

namespace {

void check_profile(const BlockPartition& part, const DivergenceProfile& div) {
    if (static_cast<long long>(div.per_block.size()) != part.block_count())
        throw std::invalid_argument("DivergenceProfile: length must equal J = n/m");
}

ComparatorKind envelope_comparator(const MgfEnvelope& env) {
    switch (env.kind) {
        case MgfEnvelope::Kind::catoni_unit: return ComparatorKind::Catoni(1.0);
        case MgfEnvelope::Kind::maurer_kl: return ComparatorKind::BinaryKl();
        default: return ComparatorKind::Difference();
    }
}

}  // namespace

BoundReport theorem1_bound(const BlockPartition& part, const MgfEnvelope& env,
                           double lambda, const DivergenceProfile& div) {
    check_profile(part, div);
    const double upper = env.domain_bound(part.m) * part.n / part.m;
    if (!(lambda > 0.0) || !(lambda < upper))
        throw std::invalid_argument("theorem1_bound: lambda outside (0, b n/m)");
    if (div.has_infinite())
        return {kInfinity, envelope_comparator(env), lambda, false};
    const double j = static_cast<double>(part.block_count());
    const double lambda_prime = lambda * part.m / part.n;
    const double value = (j * env.log_phi(lambda_prime, part.m) + div.sum()) / lambda;
    return {value, envelope_comparator(env), lambda, true};
}

double catoni_rhs(const BlockPartition& part, const DivergenceProfile& div) {
    check_profile(part, div);
    return div.sum() / static_cast<double>(part.n);
}

double gen_bound_catoni(const BlockPartition& part, const DivergenceProfile& div) {
    return std::sqrt(catoni_rhs(part, div) / 4.0);
}

double kl_direct_bound(const BlockPartition& part, const DivergenceProfile& div) {
    check_profile(part, div);
    const double m = static_cast<double>(part.m);
    return std::log(2.0 * std::sqrt(m)) / m + div.sum() / static_cast<double>(part.n);
}

double gen_bound_kl_direct(const BlockPartition& part, const DivergenceProfile& div) {
    return comparators::pinsker_upper(kl_direct_bound(part, div));
}

SubgaussianBound gen_bound_subgaussian(const BlockPartition& part, double sigma_sq,
                                       const DivergenceProfile& div) {
    check_profile(part, div);
    if (!(sigma_sq > 0.0))
        throw std::invalid_argument("gen_bound_subgaussian: sigma_sq must be > 0");
    const double total = div.sum();
    if (total == 0.0) return {0.0, 0.0};
    if (std::isinf(total)) return {kInfinity, kInfinity};
    const double n = static_cast<double>(part.n);
    return {std::sqrt(2.0 * sigma_sq * total / n),
            std::sqrt(2.0 * n * total / sigma_sq)};
}

double markov_high_prob_bound(double theorem1_value, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("markov_high_prob_bound: delta outside (0,1)");
    if (theorem1_value < 0.0)
        throw std::invalid_argument("markov_high_prob_bound: negative comparator value");
    return theorem1_value / delta;
}

double catoni_binomial_mgf(long long m, UnitInterval p, double beta,
                           double lambda_prime) {
    if (m < 1) throw std::invalid_argument("catoni_binomial_mgf: m must be >= 1");
    if (!(beta > 0.0) || !(lambda_prime > 0.0))
        throw std::invalid_argument("catoni_binomial_mgf: beta, lambda' must be > 0");
    const double pv = p.value();
    // Log space; lambda_prime/m is computed first so lambda' = m cancels exactly.
    const double log_num = m * std::log1p(pv * std::expm1(-beta * (lambda_prime / m)));
    const double log_den = lambda_prime * std::log1p(pv * std::expm1(-beta));
    return std::exp(log_num - log_den);
}

double binomial_kl_mgf(long long m, UnitInterval p) {
    if (m < 1 || m > 25)
        throw std::invalid_argument("binomial_kl_mgf: m outside enumeration range [1,25]");
    const double pv = p.value();
    // Degenerate p: the only possible outcome has kl = 0.
    if (pv == 0.0 || pv == 1.0) return 1.0;
    // The p^k (1-p)^(m-k) weight cancels against exp(m kl(k/m, p)) exactly,
    // leaving C(m,k) (k/m)^k ((m-k)/m)^(m-k); summing this form keeps the
    // m = 1 equality case at exactly 2.
    double total = 2.0;  // k = 0 and k = m terms are exactly 1 each
    for (long long k = 1; k < m; ++k) {
        const double kd = static_cast<double>(k), md = static_cast<double>(m);
        const double log_term = std::lgamma(md + 1.0) - std::lgamma(kd + 1.0) -
                                std::lgamma(md - kd + 1.0) +
                                kd * std::log(kd / md) +
                                (md - kd) * std::log((md - kd) / md);
        total += std::exp(log_term);
    }
    return total;
}

}  // namespace macbound::bound_engine
