#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Cutoff stochastic Burgers equation: simulation and Fock-space checks"};
    app.require_subcommand(1, 1);

    cli::Invocation inv;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    for (const auto& info : cli::command_table()) {
        auto* sub = app.add_subcommand(std::string(info.name), std::string(info.summary));
        sub->add_option("--config", inv.config_path, "TOML run description")->required();
        sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "overrides run.seed");
        sub->add_option("--threads", threads, "worker threads (falls back to BURGERS_CHAOS_THREADS)")
            ->check(CLI::Range(1u, 1024u));
        sub->add_option("--budget-mb", inv.overrides.budget_mb, "memory budget for dense and sparse assemblies")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        sub->callback([&inv, name = std::string(info.name)] { inv.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kConfigError;
    }
    inv.overrides.seed = seed;
    inv.overrides.threads = threads;
    return cli::run(inv, std::cout, std::cerr);
}
