#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace macbound::experiments {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { figure1, counterexample, rates, verify_mgf };
enum class OutputFormat { csv, json };

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::figure1;
    long long n_max = 0;  // 0 = experiment default
    double mu = 0.5;
    long long trials = 100000;
    std::uint64_t seed = 1;
    std::string out_path;
    OutputFormat format = OutputFormat::csv;
};

/// Row of the Gaussian-example study: the Monte Carlo generalization error
/// and the three bound families at block sizes 1, n/2, and ~sqrt(n).
/// The CSV schema carries exactly the named bound columns; the std-error
/// and effective block size are exposed in-memory and as header comments.
struct Figure1Row {
    long long num_training_samples;
    double mc;
    double cat1, kl1, diff1;
    double klnhalf, catnhalf, diffnhalf;
    double klsqrt, catsqrt, diffsqrt;
    double mc_std_error;
    long long m_sqrt_requested;
    long long m_sqrt_effective;
};

struct CounterexampleRow {
    long long n;
    double phi;
    double rhs_bound;
    double rhs_final_constant;
    double sqrt_n_rhs_bound;
    double overfit_gap_lower;
    double instantaneous_divergence_upper;
    double overfit_frequency;
    long long overfit_trials;
    std::optional<double> conditional_gap_min;
    std::optional<double> conditional_gap_mean;
    double gen_mean;
};

struct RateFitRow {
    double alpha;
    double fitted_slope;
    double predicted_exponent;
};

struct RateTableRow {
    double gamma;
    double alpha_star;
    double optimal_exponent;
};

struct MgfRow {
    long long m;
    double max_abs_catoni_dev;  // |Phi(m) - 1| over the beta x p grid
    double kl_mgf_max;          // max over the p grid
    double maurer_bound;        // 2 sqrt(m)
};

template <typename Row>
struct RunResult {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<Row> rows;
};

struct RatesResult {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<RateFitRow> fits;
    std::vector<RateTableRow> table;
};

/// Largest divisor of n not exceeding cap (cap >= 1).
long long largest_divisor_not_exceeding(long long n, long long cap);

RunResult<Figure1Row> run_figure1(const ExperimentConfig& config);
RunResult<CounterexampleRow> run_counterexample(const ExperimentConfig& config);
RatesResult run_rates(const ExperimentConfig& config);
RunResult<MgfRow> run_verify_mgf(const ExperimentConfig& config);

/// Dispatches on config.experiment, writes the output file, and returns a
/// process exit code (nonzero when an internal consistency check failed).
int run_experiment(const ExperimentConfig& config);

}  // namespace macbound::experiments
