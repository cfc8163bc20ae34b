// SPDX-License-Identifier: Apache-2.0

#include "ars/experiment.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ars/parallel.hpp"

namespace fs = std::filesystem;

namespace ars {

namespace {

// The shipped reflector design: normal incidence deflected to +65 deg at
// 26 GHz, 16-element supercell, 3-bit loads, 48x48 unit cells per panel.
constexpr double design_angle_deg = 65.0;
constexpr double design_freq_ghz = 26.0;
constexpr int design_elements = 16;
constexpr int design_bits = 3;
constexpr int base_cells = 48;
constexpr double horn_hpbw_deg = 22.0;

std::string fmt(const char* f, ...)
{
    char buf[256];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

struct Context {
    RunConfig cfg;
    Scene scene;
    LinkParams link; // frequency set per evaluation
    PanelSpec panel;
    ElementModel element = ElementModel::huygens();
    CorrectionTable corrections;
    bool has_corrections = false;
    std::vector<MeasurementRecord> measurements;

    Eigen::Vector3d rx_position(double angle_deg) const
    {
        const Eigen::Vector3d n = scene.ar_normal.normalized();
        Eigen::Vector3d u = scene.ar_gradient_axis;
        u -= u.dot(n) * n;
        u.normalize();
        const double a = deg2rad(angle_deg);
        return scene.ar_position + scene.rx_arc_radius_m * (std::cos(a) * n + std::sin(a) * u);
    }
};

ElementModel element_from_config(const std::string& name)
{
    if (name == "huygens")
        return ElementModel::huygens();
    if (name == "cosine")
        return ElementModel::cosine(1.0);
    if (name == "isotropic")
        return ElementModel::isotropic();
    return ElementModel::imported(read_pattern(name)); // treated as a file path
}

Context make_context(const RunConfig& cfg)
{
    Context ctx;
    ctx.cfg = cfg;
    if (cfg.scene_path.empty())
        throw config_error("config: scene file is required");
    if (cfg.link_path.empty())
        throw config_error("config: link parameter file is required");
    ctx.scene = load_scene(cfg.scene_path);
    if (!ctx.scene.has_nodes)
        throw data_error(cfg.scene_path + ": scene must declare the node geometry");
    ctx.link = read_link_params(cfg.link_path);

    const SupercellSpec cell =
        design_supercell(Angle{design_angle_deg}, Frequency::from_ghz(design_freq_ghz),
                         design_elements, design_bits);
    const PanelSpec base = make_panel(cell, base_cells, base_cells);
    ctx.panel = cfg.panel == 96 ? tile_panel(base, 2, 2) : base;
    ctx.element = element_from_config(cfg.element);

    if (!cfg.corrections_path.empty()) {
        ctx.corrections = read_correction_table(cfg.corrections_path);
        ctx.has_corrections = true;
    }
    if (!cfg.measurements_path.empty())
        ctx.measurements = parse_measurements(cfg.measurements_path);
    for (double a : cfg.angles_deg)
        if (!(a > -90.0) || !(a < 90.0))
            throw config_error("config: observation angles must be inside (-90, 90) deg");
    return ctx;
}

ExperimentResult run_sweep(const RunConfig& cfg, const std::string& name)
{
    Context ctx = make_context(cfg);
    const Eigen::Vector3d ar_pos = ctx.scene.ar_position;

    AntennaNode tx;
    tx.position = ctx.scene.tx_position;
    tx.boresight = (ar_pos - tx.position).normalized();
    tx.peak_gain_dbi = ctx.link.g_t.db;
    tx.hpbw_deg = horn_hpbw_deg;

    ExperimentResult result;
    result.name = name;

    const Eigen::Vector3d dir_ar_to_tx = (tx.position - ar_pos).normalized();
    for (double f_ghz : cfg.frequencies_ghz) {
        const Frequency f = Frequency::from_ghz(f_ghz);
        LinkParams lp = ctx.link;
        lp.f = f;
        const ARNode ar = make_ar_node(ctx.scene, ctx.panel, ctx.element, f);
        const GainDb g_rx{ar.rx_gain_dbi(dir_ar_to_tx)};

        for (double angle : cfg.angles_deg) {
            AntennaNode rx;
            rx.position = ctx.rx_position(angle);
            rx.boresight = (ar_pos - rx.position).normalized();
            rx.peak_gain_dbi = ctx.link.g_r.db;
            rx.hpbw_deg = horn_hpbw_deg;
            const Eigen::Vector3d dir_ar_to_rx = (rx.position - ar_pos).normalized();

            const double sigma = bistatic_sigma_ideal(
                BistaticGeometry{Angle{0.0}, Angle{angle}, ctx.panel.area_m2()}, f);
            const PowerLevel p1 = chain_terminal(received_power_method1(lp, sigma), lp);
            const GainDb g_tx{ar.tx_gain_dbi(dir_ar_to_rx)};
            const PowerLevel p2 =
                chain_terminal(received_power_method2(lp, g_rx, g_tx), lp);
            const PowerLevel rt0 =
                simulate_ar_link(ctx.scene, tx, ar, rx, f, 0, lp, cfg.summation);

            std::vector<std::pair<std::string, double>> methods;
            methods.emplace_back("method1", p1.dbm);
            methods.emplace_back("method2", p2.dbm);
            methods.emplace_back("rt0", rt0.dbm);
            if (cfg.max_order > 0) {
                const PowerLevel rt = simulate_ar_link(ctx.scene, tx, ar, rx, f,
                                                       cfg.max_order, lp, cfg.summation);
                methods.emplace_back("rt" + std::to_string(cfg.max_order), rt.dbm);
            }

            const bool correctable =
                ctx.has_corrections && ctx.corrections.contains(f_ghz, angle);
            double evm_source = methods.back().second;
            if (correctable) {
                const double diff = ctx.corrections.p_diff_db(f_ghz, angle);
                const std::size_t base_count = methods.size();
                for (std::size_t i = 0; i < base_count; ++i)
                    methods.emplace_back(methods[i].first + "_corrected",
                                         methods[i].second - diff);
                evm_source = methods.back().second;
            }
            for (const auto& [method, dbm] : methods)
                result.rows.push_back({f_ghz, angle, method, dbm});

            const EvmEstimate evm = evm_estimate(PowerLevel{evm_source},
                                                 cfg.bandwidth_mhz * 1e6,
                                                 cfg.noise_figure_db);
            result.evm_rows.push_back({f_ghz, angle, evm.evm_percent, evm.pass_16qam});
        }
    }
    return result;
}

} // namespace

ExperimentResult run_angular_sweep(const RunConfig& config)
{
    return run_sweep(config, "sweep_angle");
}

ExperimentResult run_frequency_sweep(const RunConfig& config)
{
    return run_sweep(config, "sweep_frequency");
}

ExperimentResult run_los_reference(const RunConfig& config)
{
    Context ctx = make_context(config);
    ExperimentResult result;
    result.name = "los_ref";

    for (double f_ghz : config.frequencies_ghz) {
        LinkParams lp = ctx.link;
        lp.f = Frequency::from_ghz(f_ghz);
        for (double angle : config.angles_deg) {
            const double r3 = (ctx.scene.tx_position - ctx.rx_position(angle)).norm();
            const PowerLevel p_theory = los_reference(lp, r3);
            result.rows.push_back({f_ghz, angle, "theory", p_theory.dbm});

            if (!ctx.measurements.empty()) {
                const auto rec = std::find_if(
                    ctx.measurements.begin(), ctx.measurements.end(),
                    [&](const MeasurementRecord& m) {
                        return m.waveform == Waveform::modulated_16qam_400mhz &&
                               std::llround(m.freq_ghz * 1e6) == std::llround(f_ghz * 1e6) &&
                               std::llround(m.angle_deg * 1e6) == std::llround(angle * 1e6);
                    });
                if (rec != ctx.measurements.end()) {
                    result.emitted_table.insert(
                        f_ghz, angle,
                        power_difference_db(p_theory, PowerLevel{rec->p_m_dbm}));
                    result.has_table = true;
                }
            }
        }
    }
    return result;
}

std::vector<ResultRow> correct_results(const std::vector<ResultRow>& rows,
                                       const CorrectionTable& table)
{
    std::vector<ResultRow> out;
    for (const ResultRow& r : rows) {
        if (!table.contains(r.freq_ghz, r.angle_deg))
            continue;
        out.push_back({r.freq_ghz, r.angle_deg, r.method + "_corrected",
                       r.p_dbm - table.p_diff_db(r.freq_ghz, r.angle_deg)});
    }
    return out;
}

void write_pivot(const std::vector<ResultRow>& rows, const std::string& path)
{
    // method columns in first-appearance order
    std::vector<std::string> methods;
    for (const ResultRow& r : rows)
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
    std::vector<double> freqs;
    for (const ResultRow& r : rows)
        if (std::find(freqs.begin(), freqs.end(), r.freq_ghz) == freqs.end())
            freqs.push_back(r.freq_ghz);

    std::ostringstream os;
    bool first_block = true;
    for (double f : freqs) {
        if (!first_block)
            os << "\n\n"; // gnuplot index separator
        first_block = false;
        os << fmt("# freq_ghz = %.2f\n", f);
        os << "# angle_deg";
        for (const auto& m : methods)
            os << " " << m;
        os << "\n";
        std::vector<double> angles;
        for (const ResultRow& r : rows)
            if (r.freq_ghz == f &&
                std::find(angles.begin(), angles.end(), r.angle_deg) == angles.end())
                angles.push_back(r.angle_deg);
        for (double a : angles) {
            os << fmt("%.1f", a);
            for (const auto& m : methods) {
                const auto it = std::find_if(rows.begin(), rows.end(), [&](const ResultRow& r) {
                    return r.freq_ghz == f && r.angle_deg == a && r.method == m;
                });
                if (it == rows.end())
                    os << " nan";
                else
                    os << fmt(" %.4f", it->p_dbm);
            }
            os << "\n";
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw data_error("cannot write '" + path + "'");
    out << os.str();
}

void emit_report(const std::vector<ExperimentResult>& results, const std::string& out_dir)
{
    if (results.empty())
        throw data_error("emit_report: empty result set");
    for (const ExperimentResult& r : results)
        if (r.rows.empty())
            throw data_error("emit_report: experiment '" + r.name + "' produced no rows");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw data_error("emit_report: cannot create '" + out_dir + "': " + ec.message());

    for (const ExperimentResult& r : results) {
        const fs::path dir(out_dir);
        write_results_csv(r.rows, (dir / (r.name + ".csv")).string());
        write_pivot(r.rows, (dir / (r.name + "_pivot.dat")).string());
        if (!r.evm_rows.empty()) {
            std::string text = "freq_ghz, angle_deg, evm_percent, pass_16qam\n";
            for (const auto& e : r.evm_rows)
                text += fmt("%.2f, %.1f, %.4f, %s\n", e.freq_ghz, e.angle_deg,
                            e.evm_percent, e.pass_16qam ? "pass" : "fail");
            std::ofstream out((dir / (r.name + "_evm.csv")).string(), std::ios::binary);
            if (!out)
                throw data_error("emit_report: cannot write EVM table");
            out << text;
        }
        if (r.has_table)
            write_correction_table(r.emitted_table, (dir / (r.name + "_pdiff.csv")).string());
    }
}

} // namespace ars
