#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simboot/commands.hpp"
#include "simboot/config.hpp"
#include "simboot/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
    std::string config;
    std::vector<std::string> alphas;
    simboot::ConfigOverrides overrides;
};

void add_run_flags(CLI::App& cmd, Flags& flags) {
    cmd.set_help_flag("--help", "print this help and exit");
    cmd.add_option("--config", flags.config, "key=value configuration file");
    auto scalar = [&](const std::string& flag, const std::string& key, const std::string& help) {
        cmd.add_option_function<std::string>(
            flag, [&flags, key](const std::string& v) { flags.overrides.emplace_back(key, v); }, help);
    };
    scalar("--family", "family", "lc, lq or qt");
    scalar("--h", "h", "kernel bandwidth");
    scalar("--n", "n", "sample size");
    scalar("--k", "k", "number of local models");
    scalar("--b", "b", "bootstrap replicates");
    scalar("--m", "m", "Monte-Carlo datasets");
    scalar("--scheme", "scheme", "gauss, exp or bern");
    scalar("--seed", "seed", "master seed (default 42)");
    scalar("--threads", "threads", "worker threads (0: all cores)");
    scalar("--out", "out", "output directory");
    scalar("--preset", "preset", "paper or desk");
    scalar("--noise-sd", "noise_sd", "noise standard deviation");
    scalar("--dgp", "dgp", "bumps, flat or table:PATH");
    scalar("--data", "data", "two-column x,y file (band only)");
    scalar("--reps", "reps", "repetitions of the correction experiment");
    scalar("--band-alpha", "band_alpha", "level of the band and the bias widths");
    cmd.add_option("--alpha", flags.alphas, "level alpha (repeatable)")->take_all();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simultaneous multiplier-bootstrap likelihood-ratio bands"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);

    struct Sub {
        simboot::Command command;
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {simboot::Command::Band, "band", "simultaneous confidence band on one dataset"},
        {simboot::Command::Coverage, "coverage", "effective coverage of the bootstrap band"},
        {simboot::Command::Correction, "correction", "Monte-Carlo vs bootstrap corrected levels"},
        {simboot::Command::Bias, "bias", "modelling bias and band widths per center"},
    };
    Flags flags;
    std::vector<std::pair<CLI::App*, simboot::Command>> commands;
    for (const auto& s : subs) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_run_flags(*cmd, flags);
        commands.emplace_back(cmd, s.command);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (!flags.alphas.empty()) {
            std::ostringstream joined;
            for (std::size_t i = 0; i < flags.alphas.size(); ++i) joined << (i ? "," : "") << flags.alphas[i];
            flags.overrides.emplace_back("alpha", joined.str());
        }
        std::optional<std::filesystem::path> file;
        if (!flags.config.empty()) file = flags.config;
        const auto config = simboot::load_config(file, flags.overrides);
        for (const auto& [cmd, command] : commands) {
            if (!cmd->parsed()) continue;
            const auto path = simboot::run_command(command, config);
            std::cout << path.string() << '\n';
        }
        return 0;
    } catch (const simboot::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const simboot::InvalidAlpha& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const simboot::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
