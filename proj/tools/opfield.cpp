#include "opfield/runconfig.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"opfield: config-driven runs of the truncated operator-field solvers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;

    static const std::pair<const char*, const char*> kCommands[] = {
        {"solve-sourced", "Picard iteration for the sourced nonlinear equation"},
        {"certify", "sourced solve with the contraction certificate as the product"},
        {"solve-phi3", "Gauss-Newton solve of the quadratic-kernel system"},
        {"wightman", "sampled vacuum n-point values of a random field"},
        {"reconstruct", "Gaussian moments, Gram quotient, and round-trip check"},
        {"intertwine-check", "basis recurrence and intertwining identity checks"},
        {"qcd-residual", "residual norms of the two-color-or-more gauge system"},
    };
    for (const auto& [name, description] : kCommands) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "key = value config file")->required();
        sub->add_option("--set", overrides, "override a config key (key=value, repeatable)");
        sub->add_option("--out", out_dir, "output directory, created if missing");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        const auto cfg = opfield::cli::load_config(config_path, command, overrides);
        return opfield::cli::run_command(cfg, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
