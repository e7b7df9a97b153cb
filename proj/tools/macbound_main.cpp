#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "macbound/experiments.hpp"

int main(int argc, char** argv) {
    using macbound::experiments::ExperimentConfig;
    using macbound::experiments::ExperimentKind;
    using macbound::experiments::OutputFormat;

    CLI::App app{"Block-sample MAC-Bayes bound experiments"};
    app.require_subcommand(1);

    const std::map<std::string, std::pair<ExperimentKind, const char*>> kinds{
        {"figure1",
         {ExperimentKind::figure1,
          "Gaussian example: Monte Carlo gap vs the bound families"}},
        {"counterexample",
         {ExperimentKind::counterexample,
          "overfitting scenario: analytic chain plus end-to-end simulation"}},
        {"rates",
         {ExperimentKind::rates, "empirical log-log rate fits and the rate table"}},
        {"verify-mgf",
         {ExperimentKind::verify_mgf, "brute-force checks of the MGF envelopes"}}};

    ExperimentConfig config;
    std::string format = "csv";
    for (const auto& [name, entry] : kinds) {
        const auto kind = entry.first;
        auto* sub = app.add_subcommand(name, entry.second);
        sub->add_option("--n-max", config.n_max,
                        "largest sample size on the grid (0 = experiment default)");
        sub->add_option("--mu", config.mu, "true mean for the Gaussian scenario");
        sub->add_option("--trials", config.trials, "Monte Carlo trials per grid point");
        sub->add_option("--seed", config.seed, "master RNG seed");
        sub->add_option("--out", config.out_path, "output file path")->required();
        sub->add_option("--format", format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->callback([&config, kind] { config.experiment = kind; });
    }

    CLI11_PARSE(app, argc, argv);
    config.format = format == "json" ? OutputFormat::json : OutputFormat::csv;

    try {
        return macbound::experiments::run_experiment(config);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }
}
