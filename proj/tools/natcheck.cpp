// natcheck: scenario runner for weak chain-rule verification.
//   natcheck run <scenario.cfg> --out results.csv
//   natcheck sweep <scenario.cfg> --out results.csv
//   natcheck selftest [--out results.csv] [--inject-sign-fault]
// NATCHECK_THREADS limits the worker count (results are thread-invariant).

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "natform/runner.hpp"

namespace {

int write_out(const natform::RunResult& result, const std::string& out_path) {
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << out_path << "\n";
            return 2;
        }
        out << result.csv;
    } else {
        std::cout << result.csv;
    }
    std::cerr << result.summary;
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"natcheck — pullback chain-rule residual scenarios"};
    app.require_subcommand(1);

    std::string scenario_path, out_path;
    bool inject_fault = false;

    auto* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenario_path, "scenario config file")->required();
    run->add_option("--out", out_path, "CSV output path (default: stdout)");

    auto* sweep = app.add_subcommand("sweep", "run a scenario's parameter sweep");
    sweep->add_option("scenario", scenario_path, "scenario config file")->required();
    sweep->add_option("--out", out_path, "CSV output path (default: stdout)");

    auto* self = app.add_subcommand("selftest", "run the invariant suite");
    self->add_option("--out", out_path, "CSV output path (default: stdout)");
    self->add_flag("--inject-sign-fault", inject_fault,
                   "perturb the pairing sign convention (expected to fail)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return write_out(natform::run_scenario(natform::parse_scenario_file(scenario_path)),
                             out_path);
        }
        if (sweep->parsed()) {
            return write_out(natform::sweep_scenario(natform::parse_scenario_file(scenario_path)),
                             out_path);
        }
        return write_out(natform::run_selftest(inject_fault), out_path);
    } catch (const natform::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
