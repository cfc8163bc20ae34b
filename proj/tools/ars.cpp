// SPDX-License-Identifier: Apache-2.0
//
// ars command-line experiment runner.
//
// Verbs: sweep-angle, sweep-frequency, los-ref, correct, report.
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "ars/experiment.hpp"

namespace {

struct SweepOptions {
    std::string config_path;
    std::string out_dir = "out";
    int panel = 0;      // 0 = keep config value
    int max_order = -1; // -1 = keep config value
    bool coherent = false;
};

void add_sweep_options(CLI::App* cmd, SweepOptions& opt)
{
    cmd->add_option("--config", opt.config_path, "run configuration file")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--panel", opt.panel, "panel override (48 or 96)")
        ->check(CLI::IsMember({48, 96}));
    cmd->add_option("--max-order", opt.max_order, "reflection order override (0..3)")
        ->check(CLI::Range(0, 3));
    cmd->add_flag("--coherent", opt.coherent, "sum multipath fields coherently");
}

ars::RunConfig load_with_overrides(const SweepOptions& opt)
{
    ars::RunConfig cfg = ars::parse_config(opt.config_path);
    if (opt.panel != 0)
        cfg.panel = opt.panel;
    if (opt.max_order >= 0)
        cfg.max_order = opt.max_order;
    if (opt.coherent)
        cfg.summation = ars::Summation::coherent;
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ars -- anomalous-reflector link simulator"};
    app.require_subcommand(1);

    SweepOptions angle_opt, freq_opt, los_opt;
    auto* sweep_angle =
        app.add_subcommand("sweep-angle", "received power across the Rx arc");
    add_sweep_options(sweep_angle, angle_opt);
    auto* sweep_freq =
        app.add_subcommand("sweep-frequency", "received power across the frequency list");
    add_sweep_options(sweep_freq, freq_opt);
    auto* los_ref = app.add_subcommand(
        "los-ref", "line-of-sight reference and correction-table builder");
    los_ref->add_option("--config", los_opt.config_path, "run configuration file")
        ->required();
    los_ref->add_option("--out", los_opt.out_dir, "output directory");

    std::string results_path, table_path, out_dir = "out";
    auto* correct =
        app.add_subcommand("correct", "apply a correction table to a results CSV");
    correct->add_option("--results", results_path, "results CSV")->required();
    correct->add_option("--table", table_path, "correction table")->required();
    correct->add_option("--out", out_dir, "output directory");

    std::string report_results;
    auto* report =
        app.add_subcommand("report", "pivot a results CSV into gnuplot-ready data");
    report->add_option("--results", report_results, "results CSV")->required();
    report->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (sweep_angle->parsed()) {
            const auto result = ars::run_angular_sweep(load_with_overrides(angle_opt));
            ars::emit_report({result}, angle_opt.out_dir);
        } else if (sweep_freq->parsed()) {
            const auto result = ars::run_frequency_sweep(load_with_overrides(freq_opt));
            ars::emit_report({result}, freq_opt.out_dir);
        } else if (los_ref->parsed()) {
            const auto result = ars::run_los_reference(ars::parse_config(los_opt.config_path));
            ars::emit_report({result}, los_opt.out_dir);
        } else if (correct->parsed()) {
            const auto rows = ars::read_results_csv(results_path);
            const auto table = ars::read_correction_table(table_path);
            const auto corrected = ars::correct_results(rows, table);
            if (corrected.empty())
                throw ars::data_error("correct: no rows match the correction table");
            std::filesystem::create_directories(out_dir);
            ars::write_results_csv(
                corrected, (std::filesystem::path(out_dir) / "corrected.csv").string());
        } else if (report->parsed()) {
            const auto rows = ars::read_results_csv(report_results);
            if (rows.empty())
                throw ars::data_error("report: results file has no rows");
            std::filesystem::create_directories(out_dir);
            ars::write_pivot(rows,
                             (std::filesystem::path(out_dir) / "pivot.dat").string());
        }
    } catch (const ars::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ars::data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
