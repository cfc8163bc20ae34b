// SPDX-License-Identifier: Apache-2.0
//
// ars -- anomalous-reflector link simulation library
//
// Line-oriented text formats: pattern tables, correction tables, measured
// records, link parameters, run configuration and result CSVs. All files are
// UTF-8 with LF line endings and a header line; angles are stored in degrees.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ars/linkbudget.hpp"
#include "ars/pattern.hpp"
#include "ars/raytrace.hpp"

namespace ars {

// Configuration / CLI usage errors (exit code 2).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or missing data files (exit code 3).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Waveform { modulated_16qam_400mhz, modulated_64qam_100mhz, continuous_wave };

std::string to_string(Waveform w);
Waveform waveform_from_string(const std::string& s);

// One measured received-power sample.
struct MeasurementRecord {
    double freq_ghz = 0.0;
    double angle_deg = 0.0;
    Waveform waveform = Waveform::continuous_wave;
    double p_m_dbm = 0.0;
    std::optional<double> evm_percent;
};

// `freq_ghz, angle_deg, waveform, p_m_dbm, evm_percent` (EVM may be empty).
// Duplicate (frequency, angle, waveform) keys are rejected.
std::vector<MeasurementRecord> parse_measurements(const std::string& path);
void write_measurements(const std::vector<MeasurementRecord>& records,
                        const std::string& path);

// `freq_ghz, angle_deg, p_diff_db` with header.
CorrectionTable read_correction_table(const std::string& path);
void write_correction_table(const CorrectionTable& table, std::ostream& os);
void write_correction_table(const CorrectionTable& table, const std::string& path);

// One-row table `p_t_dbm, g_t_db, g_r_db, l_t_db, g_a_db, r1_m, r2_m`.
// The frequency is set per evaluation, not stored in the file.
LinkParams read_link_params(const std::string& path);
void write_link_params(const LinkParams& params, const std::string& path);

// `theta_deg, phi_deg, gain_dbi, phase_deg`, theta-major ordering. Comment
// lines carry the frequency and normalization tag; files without a tag are
// treated as gain tables (directivity-scaled). Import reconstructs the
// complex amplitude.
RadiationPattern read_pattern(const std::string& path);
void write_pattern(const RadiationPattern& pattern, const std::string& path);

// Experiment configuration, `key = value` lines with '#' comments.
// Unknown keys are rejected.
struct RunConfig {
    int panel = 48;                       // 48 | 96 (tiled 2x2)
    std::vector<double> angles_deg;       // Rx arc positions
    std::vector<double> frequencies_ghz;
    int max_order = 3;
    Summation summation = Summation::incoherent;
    std::string element = "huygens";      // huygens | cosine | isotropic | file path
    std::string scene_path;
    std::string corrections_path;         // optional
    std::string measurements_path;        // optional
    std::string link_path;
    double bandwidth_mhz = 400.0;
    double noise_figure_db = 2.7;

    bool operator==(const RunConfig&) const = default;
};

// Relative file paths inside the config resolve against the config file's
// directory.
RunConfig parse_config(const std::string& path);
void write_config(const RunConfig& config, const std::string& path);

// Result rows `freq_ghz, angle_deg, method, p_dbm` with fixed formatting
// (%.2f, %.1f, text, %.4f) for diff-friendly goldens.
struct ResultRow {
    double freq_ghz = 0.0;
    double angle_deg = 0.0;
    std::string method;
    double p_dbm = 0.0;
};

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_results_csv(const std::string& path);

} // namespace ars
