// Benchmark CLI for the phaseloom phase-retrieval library.
//
//   phaseloom run <config.json>
//   phaseloom validate <config.json>
//   phaseloom sweep <config.json> --param lambda --values 0,0.45,1
//
// Exit codes: 0 success, 1 I/O failure, 2 invalid config or usage.
#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "phaseloom/errors.hpp"
#include "phaseloom/experiment.hpp"

namespace {

std::vector<std::string> split_values(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty()) out.push_back(token);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phaseloom: phase-diversity phase retrieval benchmark runner"};
    app.require_subcommand(1);

    std::string run_config, validate_config_path, sweep_config, sweep_param, sweep_values;

    CLI::App* run_cmd = app.add_subcommand("run", "run an experiment config");
    run_cmd->add_option("config", run_config, "experiment config (JSON)")->required();

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "check an experiment config without running it");
    validate_cmd->add_option("config", validate_config_path, "experiment config (JSON)")
        ->required();

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "re-run a config over a range of one parameter");
    sweep_cmd->add_option("config", sweep_config, "base experiment config (JSON)")->required();
    sweep_cmd->add_option("--param", sweep_param, "lambda|snr|m")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma separated value list")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return phaseloom::run_experiment_file(run_config);

        if (validate_cmd->parsed()) {
            const auto diags = phaseloom::validate_config_file(validate_config_path);
            if (diags.empty()) {
                std::cout << "ok\n";
                return 0;
            }
            for (const auto& d : diags)
                std::cerr << "config error: " << d.path << ": " << d.message << "\n";
            return 2;
        }

        if (sweep_cmd->parsed()) {
            const auto param = phaseloom::sweep_param_from_name(sweep_param);
            return phaseloom::sweep_file(sweep_config, param, split_values(sweep_values));
        }
    } catch (const phaseloom::ParameterError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const phaseloom::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const phaseloom::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
