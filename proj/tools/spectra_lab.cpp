#include <iostream>

#include <CLI11.hpp>

#include "spectra/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"spectra-lab: experiments on Schrodinger operators with decaying potentials"};
    app.footer(spectra::describe_outputs() + "\nExit status: 0 success, 2 invalid configuration, 3 numerical failure.");

    std::string experiment;
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("experiment", experiment, "Experiment to run")
        ->required()
        ->check(CLI::IsMember(spectra::experiment_names()));
    app.add_option("--config", config, "JSON config file")->required();
    auto* out_opt = app.add_option("--out", out, "Output directory (must not exist or be empty)");
    auto* seed_opt = app.add_option("--seed", seed, "Base seed");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return spectra::kExitValidation;
    }

    spectra::Overrides o;
    if (*out_opt) o.out = out;
    if (*seed_opt) o.seed = seed;
    if (*threads_opt) o.threads = threads;
    return spectra::run(experiment, config, o, std::cerr);
}
