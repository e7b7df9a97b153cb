#include "macbound/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "macbound/bound_engine.hpp"
#include "macbound/counterexample.hpp"
#include "macbound/gaussian_example.hpp"
#include "macbound/rates.hpp"
#include "macbound/rng.hpp"

namespace macbound::experiments {

namespace {

using nlohmann::json;

// Full double precision, '.' decimal separator; pinned so that identical
// configs reproduce byte-identical files.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(std::optional<double> v) { return v ? fmt(*v) : std::string(); }

json json_value(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << contents;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::string header_comment(const ExperimentConfig& config, const char* name) {
    std::ostringstream out;
    out << "# macbound " << kVersion << " experiment=" << name
        << " seed=" << config.seed << " trials=" << config.trials
        << " n_max=" << config.n_max << " mu=" << fmt(config.mu) << "\n";
    return out.str();
}

json meta_json(const ExperimentConfig& config, const char* name) {
    return {{"tool", "macbound"},
            {"version", kVersion},
            {"experiment", name},
            {"seed", config.seed},
            {"trials", config.trials},
            {"n_max", config.n_max},
            {"mu", config.mu}};
}

constexpr double kSigmaSqHoeffding = 0.25;  // [0,1]-bounded loss

template <typename Result>
void record(Result& result, bool condition, const std::string& message) {
    if (!condition) {
        result.ok = false;
        result.failures.push_back(message);
    }
}

}  // namespace

long long largest_divisor_not_exceeding(long long n, long long cap) {
    if (n < 1 || cap < 1)
        throw std::invalid_argument("largest_divisor_not_exceeding: bad input");
    for (long long d = std::min(cap, n); d >= 1; --d)
        if (n % d == 0) return d;
    return 1;
}

RunResult<Figure1Row> run_figure1(const ExperimentConfig& config) {
    const long long n_max = config.n_max > 0 ? config.n_max : 250;
    if (n_max < 10)
        throw std::invalid_argument("run_figure1: n_max must be >= 10");
    if (!(config.mu > 0.0 && config.mu < 1.0))
        throw std::invalid_argument("run_figure1: mu must be in (0,1)");
    if (config.trials < 1)
        throw std::invalid_argument("run_figure1: trials must be >= 1");

    RunResult<Figure1Row> result;
    for (long long n = 10; n <= n_max; n += 10) {
        Figure1Row row{};
        row.num_training_samples = n;

        const auto mc = gaussian_example::mc_gen_error(
            {config.mu, n, 1}, config.trials, rng::derive_stream(config.seed, n));
        row.mc = mc.estimate;
        row.mc_std_error = mc.std_error;

        row.m_sqrt_requested =
            static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(n))));
        row.m_sqrt_effective = largest_divisor_not_exceeding(n, row.m_sqrt_requested);

        const long long block_sizes[3] = {1, n / 2, row.m_sqrt_effective};
        double cat[3], kl[3], diff[3];
        for (int i = 0; i < 3; ++i) {
            const long long m = block_sizes[i];
            const gaussian_example::GaussianScenario sc{config.mu, n, m};
            const bound_engine::BlockPartition part{n, m};
            const auto profile = bound_engine::DivergenceProfile::constant(
                part.block_count(), gaussian_example::expected_block_divergence(sc));
            cat[i] = gaussian_example::example_gen_bound(sc);
            kl[i] = bound_engine::gen_bound_kl_direct(part, profile);
            diff[i] =
                bound_engine::gen_bound_subgaussian(part, kSigmaSqHoeffding, profile)
                    .bound;
        }
        row.cat1 = cat[0]; row.kl1 = kl[0]; row.diff1 = diff[0];
        row.catnhalf = cat[1]; row.klnhalf = kl[1]; row.diffnhalf = diff[1];
        row.catsqrt = cat[2]; row.klsqrt = kl[2]; row.diffsqrt = diff[2];

        const std::string at_n = " at n=" + std::to_string(n);
        record(result, row.mc <= row.cat1 + 4.0 * row.mc_std_error,
               "mc exceeds cat1 + 4 std errors" + at_n);
        record(result, row.kl1 > row.cat1 && row.diff1 > row.cat1,
               "m=1 bound ordering violated" + at_n);
        record(result, row.klnhalf > row.catnhalf && row.diffnhalf > row.catnhalf,
               "m=n/2 bound ordering violated" + at_n);
        record(result, row.klsqrt > row.catsqrt && row.diffsqrt > row.catsqrt,
               "m=sqrt(n) bound ordering violated" + at_n);
        result.rows.push_back(row);
    }
    return result;
}

RunResult<CounterexampleRow> run_counterexample(const ExperimentConfig& config) {
    const long long n_max = config.n_max > 0 ? config.n_max : 4096;
    if (n_max < 16)
        throw std::invalid_argument("run_counterexample: n_max must be >= 16");
    if (config.trials < 1)
        throw std::invalid_argument("run_counterexample: trials must be >= 1");

    RunResult<CounterexampleRow> result;
    for (long long n = 16; n <= n_max; n *= 4) {
        const auto params = counterexample::params_from_n(n, 1);
        CounterexampleRow row{};
        row.n = n;
        row.phi = params.phi;
        row.rhs_bound = counterexample::rhs_bound(params);
        row.rhs_final_constant = counterexample::rhs_final_constant(n, 1);
        row.sqrt_n_rhs_bound = std::sqrt(static_cast<double>(n)) * row.rhs_bound;
        row.overfit_gap_lower = counterexample::overfit_gap_lower(n, 1);
        row.instantaneous_divergence_upper =
            counterexample::instantaneous_divergence_upper(n, 1);

        const auto sim = counterexample::mc_simulate(
            params, config.trials, rng::derive_stream(config.seed, n));
        row.overfit_frequency = sim.overfit_frequency;
        row.overfit_trials = sim.overfit_trials;
        row.conditional_gap_min = sim.conditional_gap_min;
        row.conditional_gap_mean = sim.conditional_gap_mean;
        row.gen_mean = sim.gen_mean;

        const std::string at_n = " at n=" + std::to_string(n);
        record(result, row.sqrt_n_rhs_bound <= row.rhs_final_constant,
               "sqrt(n) rhs_bound exceeds final constant" + at_n);
        if (row.conditional_gap_min)
            record(result, *row.conditional_gap_min >= row.overfit_gap_lower,
                   "overfit gap below the pointwise lower bound" + at_n);
        // Loose frequency sanity check; the acceptance suite applies the
        // exact Clopper-Pearson interval.
        const double tol =
            5.0 * std::sqrt(params.phi * (1.0 - params.phi) / config.trials) +
            1.0 / config.trials;
        record(result, std::abs(row.overfit_frequency - params.phi) <= tol,
               "overfit frequency far from phi" + at_n);
        result.rows.push_back(row);
    }
    return result;
}

RatesResult run_rates(const ExperimentConfig& config) {
    const long long n_max = config.n_max > 0 ? config.n_max : 4096;
    std::vector<long long> grid;
    for (long long n = 64; n <= n_max; n *= 2) grid.push_back(n);
    if (grid.size() < 3)
        throw std::invalid_argument("run_rates: grid has fewer than 3 n values");

    RatesResult result;
    const double alphas[3] = {0.0, 0.5, 1.0};
    for (double alpha : alphas) {
        std::vector<std::pair<long long, double>> points;
        for (long long n : grid) {
            long long m = 1;
            if (alpha == 0.5) {
                m = largest_divisor_not_exceeding(
                    n, static_cast<long long>(
                           std::ceil(std::sqrt(static_cast<double>(n)))));
            } else if (alpha == 1.0) {
                m = n / 2;
            }
            points.emplace_back(
                n, gaussian_example::example_gen_bound({config.mu, n, m}));
        }
        const auto fit = rates::empirical_rate_fit(points);
        // The Gaussian example has gamma = 1, so every alpha predicts -1/2.
        const double predicted = rates::gen_rate_exponent(1.0, alpha).exponent;
        record(result, std::abs(fit.slope - predicted) <= 0.05,
               "fitted slope off prediction at alpha=" + fmt(alpha));
        result.fits.push_back({alpha, fit.slope, predicted});
    }

    const double gammas[5] = {0.0, 0.5, 1.0, 1.5, 2.0};
    for (double gamma : gammas) {
        const double alpha_star = rates::optimal_alpha(gamma);
        const double exponent = rates::gen_rate_exponent(gamma, alpha_star).exponent;
        record(result,
               exponent == (std::min(gamma - 1.0, 0.0) - 1.0) / 2.0,
               "optimal-column exponent mismatch at gamma=" + fmt(gamma));
        result.table.push_back({gamma, alpha_star, exponent});
    }
    return result;
}

RunResult<MgfRow> run_verify_mgf(const ExperimentConfig&) {
    RunResult<MgfRow> result;
    const double betas[5] = {0.1, 0.5, 1.0, 2.0, 5.0};
    for (long long m = 1; m <= 20; ++m) {
        MgfRow row{};
        row.m = m;
        for (double beta : betas) {
            for (int i = 0; i <= 20; ++i) {
                const double p = i / 20.0;
                const double value = bound_engine::catoni_binomial_mgf(
                    m, p, beta, static_cast<double>(m));
                row.max_abs_catoni_dev =
                    std::max(row.max_abs_catoni_dev, std::abs(value - 1.0));
            }
        }
        for (int i = 0; i <= 100; ++i)
            row.kl_mgf_max =
                std::max(row.kl_mgf_max, bound_engine::binomial_kl_mgf(m, i / 100.0));
        row.maurer_bound = 2.0 * std::sqrt(static_cast<double>(m));

        record(result, row.max_abs_catoni_dev < 1e-12,
               "Catoni MGF identity violated at m=" + std::to_string(m));
        record(result, row.kl_mgf_max <= row.maurer_bound,
               "Maurer bound violated at m=" + std::to_string(m));
        result.rows.push_back(row);
    }
    return result;
}

namespace {

std::string figure1_csv(const ExperimentConfig& config,
                        const RunResult<Figure1Row>& result) {
    std::ostringstream out;
    out << header_comment(config, "figure1");
    out << "# diff columns use sigma_sq=" << fmt(kSigmaSqHoeffding)
        << " (Hoeffding, loss bounded in [0,1])\n";
    for (const auto& row : result.rows)
        out << "# n=" << row.num_training_samples
            << " m_sqrt_requested=" << row.m_sqrt_requested
            << " m_sqrt_effective=" << row.m_sqrt_effective << "\n";
    out << "num_training_samples,mc,cat1,kl1,diff1,klnhalf,catnhalf,diffnhalf,"
           "klsqrt,catsqrt,diffsqrt\n";
    for (const auto& row : result.rows)
        out << row.num_training_samples << ',' << fmt(row.mc) << ','
            << fmt(row.cat1) << ',' << fmt(row.kl1) << ',' << fmt(row.diff1) << ','
            << fmt(row.klnhalf) << ',' << fmt(row.catnhalf) << ','
            << fmt(row.diffnhalf) << ',' << fmt(row.klsqrt) << ','
            << fmt(row.catsqrt) << ',' << fmt(row.diffsqrt) << "\n";
    return out.str();
}

json figure1_json(const ExperimentConfig& config,
                  const RunResult<Figure1Row>& result) {
    json rows = json::array();
    for (const auto& row : result.rows)
        rows.push_back({{"num_training_samples", row.num_training_samples},
                        {"mc", row.mc},
                        {"cat1", row.cat1},
                        {"kl1", row.kl1},
                        {"diff1", row.diff1},
                        {"klnhalf", row.klnhalf},
                        {"catnhalf", row.catnhalf},
                        {"diffnhalf", row.diffnhalf},
                        {"klsqrt", row.klsqrt},
                        {"catsqrt", row.catsqrt},
                        {"diffsqrt", row.diffsqrt},
                        {"mc_std_error", row.mc_std_error},
                        {"m_sqrt_requested", row.m_sqrt_requested},
                        {"m_sqrt_effective", row.m_sqrt_effective}});
    json meta = meta_json(config, "figure1");
    meta["sigma_sq"] = kSigmaSqHoeffding;
    return {{"meta", meta}, {"rows", rows}};
}

std::string counterexample_csv(const ExperimentConfig& config,
                               const RunResult<CounterexampleRow>& result) {
    std::ostringstream out;
    out << header_comment(config, "counterexample");
    out << "n,phi,rhs_bound,rhs_final_constant,sqrt_n_rhs_bound,overfit_gap_lower,"
           "instantaneous_divergence_upper,overfit_frequency,overfit_trials,"
           "conditional_gap_min,conditional_gap_mean,gen_mean\n";
    for (const auto& row : result.rows)
        out << row.n << ',' << fmt(row.phi) << ',' << fmt(row.rhs_bound) << ','
            << fmt(row.rhs_final_constant) << ',' << fmt(row.sqrt_n_rhs_bound)
            << ',' << fmt(row.overfit_gap_lower) << ','
            << fmt(row.instantaneous_divergence_upper) << ','
            << fmt(row.overfit_frequency) << ',' << row.overfit_trials << ','
            << fmt(row.conditional_gap_min) << ',' << fmt(row.conditional_gap_mean)
            << ',' << fmt(row.gen_mean) << "\n";
    return out.str();
}

json counterexample_json(const ExperimentConfig& config,
                         const RunResult<CounterexampleRow>& result) {
    json rows = json::array();
    for (const auto& row : result.rows)
        rows.push_back(
            {{"n", row.n},
             {"phi", row.phi},
             {"rhs_bound", row.rhs_bound},
             {"rhs_final_constant", row.rhs_final_constant},
             {"sqrt_n_rhs_bound", row.sqrt_n_rhs_bound},
             {"overfit_gap_lower", row.overfit_gap_lower},
             {"instantaneous_divergence_upper", row.instantaneous_divergence_upper},
             {"overfit_frequency", row.overfit_frequency},
             {"overfit_trials", row.overfit_trials},
             {"conditional_gap_min", json_value(row.conditional_gap_min)},
             {"conditional_gap_mean", json_value(row.conditional_gap_mean)},
             {"gen_mean", row.gen_mean}});
    return {{"meta", meta_json(config, "counterexample")}, {"rows", rows}};
}

std::string rates_csv(const ExperimentConfig& config, const RatesResult& result) {
    std::ostringstream out;
    out << header_comment(config, "rates");
    out << "kind,alpha,gamma,fitted_slope,predicted_exponent,alpha_star,"
           "optimal_exponent\n";
    for (const auto& row : result.fits)
        out << "fit," << fmt(row.alpha) << ",," << fmt(row.fitted_slope) << ','
            << fmt(row.predicted_exponent) << ",,\n";
    for (const auto& row : result.table)
        out << "table1,," << fmt(row.gamma) << ",,," << fmt(row.alpha_star) << ','
            << fmt(row.optimal_exponent) << "\n";
    return out.str();
}

json rates_json(const ExperimentConfig& config, const RatesResult& result) {
    json fits = json::array(), table = json::array();
    for (const auto& row : result.fits)
        fits.push_back({{"alpha", row.alpha},
                        {"fitted_slope", row.fitted_slope},
                        {"predicted_exponent", row.predicted_exponent}});
    for (const auto& row : result.table)
        table.push_back({{"gamma", row.gamma},
                         {"alpha_star", row.alpha_star},
                         {"optimal_exponent", row.optimal_exponent}});
    return {{"meta", meta_json(config, "rates")}, {"fits", fits}, {"table1", table}};
}

std::string mgf_csv(const ExperimentConfig& config, const RunResult<MgfRow>& result) {
    std::ostringstream out;
    out << header_comment(config, "verify-mgf");
    out << "# grids: m=1..20, beta={0.1,0.5,1,2,5}, catoni p grid 21 points, "
           "kl p grid 101 points\n";
    out << "m,max_abs_catoni_dev,kl_mgf_max,maurer_bound\n";
    for (const auto& row : result.rows)
        out << row.m << ',' << fmt(row.max_abs_catoni_dev) << ','
            << fmt(row.kl_mgf_max) << ',' << fmt(row.maurer_bound) << "\n";
    return out.str();
}

json mgf_json(const ExperimentConfig& config, const RunResult<MgfRow>& result) {
    json rows = json::array();
    for (const auto& row : result.rows)
        rows.push_back({{"m", row.m},
                        {"max_abs_catoni_dev", row.max_abs_catoni_dev},
                        {"kl_mgf_max", row.kl_mgf_max},
                        {"maurer_bound", row.maurer_bound}});
    json meta = meta_json(config, "verify-mgf");
    meta["grids"] = {{"m", "1..20"},
                     {"beta", {0.1, 0.5, 1.0, 2.0, 5.0}},
                     {"catoni_p_points", 21},
                     {"kl_p_points", 101}};
    return {{"meta", meta}, {"rows", rows}};
}

template <typename Result, typename CsvFn, typename JsonFn>
int finish(const ExperimentConfig& config, const Result& result, CsvFn csv_fn,
           JsonFn json_fn) {
    if (config.format == OutputFormat::csv) {
        write_file(config.out_path, csv_fn(config, result));
    } else {
        write_file(config.out_path, json_fn(config, result).dump(2) + "\n");
    }
    if (!result.ok) {
        for (const auto& message : result.failures)
            std::fprintf(stderr, "consistency check failed: %s\n", message.c_str());
        return 1;
    }
    return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& config) {
    if (config.out_path.empty())
        throw std::invalid_argument("run_experiment: output path required");
    switch (config.experiment) {
        case ExperimentKind::figure1:
            return finish(config, run_figure1(config), figure1_csv, figure1_json);
        case ExperimentKind::counterexample:
            return finish(config, run_counterexample(config), counterexample_csv,
                          counterexample_json);
        case ExperimentKind::rates:
            return finish(config, run_rates(config), rates_csv, rates_json);
        case ExperimentKind::verify_mgf:
            return finish(config, run_verify_mgf(config), mgf_csv, mgf_json);
    }
    throw std::logic_error("run_experiment: unknown experiment");
}

}  // namespace macbound::experiments
