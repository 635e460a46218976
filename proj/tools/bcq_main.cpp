#include <CLI11.hpp>
#include <array>
#include <string>

#include "bcq/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bcq: spectrum, unique-continuation verdicts and boundary-control "
                 "experiments for the linearized Boussinesq system in a 2D periodic "
                 "channel"};
    app.require_subcommand(1);

    struct Args {
        std::string config;
        std::string out;
    };

    const char* names[] = {"spectra", "detcheck", "scan-alpha", "verdict", "control"};
    const char* descs[] = {
        "compute and export both spectral branches per mode",
        "randomized check of the boundary-matrix determinant factorization",
        "locate exceptional diffusion coefficients (zeros of F) on an interval",
        "per-eigenvalue unique-continuation verdicts with diagnostics",
        "per-mode Galerkin control experiment (Gramian + terminal targeting)"};

    std::array<Args, 5> args;
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", args[i].config, "configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", args[i].out, "output directory")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : bcq::cli::kExitConfig;
    }

    for (int i = 0; i < 5; ++i)
        if (app.get_subcommand(names[i])->parsed())
            return bcq::cli::run_command(names[i], args[i].config, args[i].out);
    return bcq::cli::kExitConfig;
}
