// Command-line front end for the experiment harness.
//
//   nsbidico run <config.yaml>
//   nsbidico compare <cell-a-dir> <cell-b-dir> --metric igd|hv
//   nsbidico export-front <record.yaml> <out.csv>
//   nsbidico list-problems
//
// Exit codes: 0 success, 1 usage error, 2 run failure, 3 incomplete cell.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nsbidico/harness.hpp"
#include "nsbidico/problems.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kRunFailure = 2, kIncomplete = 3 };

}  // namespace

int main(int argc, char** argv) {
    namespace harness = nsbidico::harness;

    CLI::App app{"Constrained multi-objective DE with a coevolving infeasible archive"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run every cell of an experiment config");
    run_cmd->add_option("config", config_path, "Experiment YAML file")->required()->check(CLI::ExistingFile);

    std::string cell_a, cell_b, metric = "igd";
    auto* compare_cmd = app.add_subcommand("compare", "Rank-sum comparison of two result cells");
    compare_cmd->add_option("cell_a", cell_a, "Directory of cell A")->required();
    compare_cmd->add_option("cell_b", cell_b, "Directory of cell B")->required();
    compare_cmd->add_option("--metric", metric, "igd or hv")->check(CLI::IsMember({"igd", "hv"}));

    std::string record_path, csv_path;
    auto* export_cmd = app.add_subcommand("export-front", "Write a run's final front as CSV");
    export_cmd->add_option("record", record_path, "Run record YAML")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("out", csv_path, "Output CSV path")->required();

    auto* list_cmd = app.add_subcommand("list-problems", "List built-in problems");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*list_cmd) {
        for (const auto& name : nsbidico::builtin_problems().names()) {
            const auto problem = nsbidico::builtin_problems().get(name);
            std::cout << name << "  n=" << problem.n << " m=" << problem.m << " inequalities="
                      << problem.p << " equalities=" << problem.l - problem.p << "\n";
        }
        return kOk;
    }

    if (*run_cmd) {
        harness::ExperimentConfig config;
        try {
            config = harness::parse_config(config_path);
        } catch (const harness::ConfigError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
        try {
            const auto result = harness::run_experiment(config);
            std::cout << "wrote " << result.records.size() << " run records to "
                      << config.output_dir.string() << "\n";
            if (!result.all_complete) {
                std::cerr << "error: some runs failed; see *.error files\n";
                return kRunFailure;
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kRunFailure;
        }
        return kOk;
    }

    if (*compare_cmd) {
        try {
            std::cout << harness::format_table(harness::compare_directories(cell_a, cell_b, metric));
        } catch (const harness::IncompleteCell& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kIncomplete;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
        return kOk;
    }

    if (*export_cmd) {
        try {
            harness::export_front(harness::read_record(record_path), csv_path);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kUsage;
        }
        return kOk;
    }
    return kUsage;
}
