// SPDX-License-Identifier: Apache-2.0
//
// ars -- anomalous-reflector link simulation library
//
// Experiment runner: angular and frequency sweeps over the measurement
// scenario, the line-of-sight reference with correction-table building, and
// deterministic CSV / gnuplot reporting.

#pragma once

#include <string>
#include <vector>

#include "ars/io.hpp"

namespace ars {

struct EvmResultRow {
    double freq_ghz = 0.0;
    double angle_deg = 0.0;
    double evm_percent = 0.0;
    bool pass_16qam = false;
};

struct ExperimentResult {
    std::string name;
    std::vector<ResultRow> rows;        // per (frequency, angle, method)
    std::vector<EvmResultRow> evm_rows;
    CorrectionTable emitted_table;      // los-ref with measurements
    bool has_table = false;
};

// Received power at every configured (frequency, angle) by method 1
// (ideal bistatic cross-section), method 2 (panel-gain cascade), and ray
// tracing at order 0 and at the configured order, plus corrected variants
// where the correction table has the key. The Rx rides the arc from the
// scene and always faces the panel.
ExperimentResult run_angular_sweep(const RunConfig& config);

// Same evaluation against the configured frequency list (the continuous-wave
// sweep); angles are the fixed observation positions.
ExperimentResult run_frequency_sweep(const RunConfig& config);

// Friis line-of-sight reference over the true Tx-Rx chord per angle; with
// measurements configured, also builds the correction table
// P_diff = P_theory - P_m from the modulated-wave records.
ExperimentResult run_los_reference(const RunConfig& config);

// One CSV per experiment plus gnuplot-ready pivot files; byte-identical
// across reruns of the same configuration.
void emit_report(const std::vector<ExperimentResult>& results, const std::string& out_dir);

// Helpers shared with the CLI `correct` and `report` verbs.
std::vector<ResultRow> correct_results(const std::vector<ResultRow>& rows,
                                       const CorrectionTable& table);
void write_pivot(const std::vector<ResultRow>& rows, const std::string& path);

} // namespace ars
