// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run through ctest or directly from the build tree.

#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <fstream>
#include <string>
#include <vector>

#include "ars/experiment.hpp"

using namespace ars;
using Vec3 = Eigen::Vector3d;

namespace {

const std::string data_dir = ARS_DATA_DIR;
int failures = 0;

void criterion(int number, const std::string& title, const std::function<bool(std::string&)>& body)
{
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d [%s] %s%s%s\n", number, ok ? "PASS" : "FAIL", title.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const Frequency f26 = Frequency::from_ghz(26.0);

PanelSpec panel48()
{
    return make_panel(design_supercell(Angle{65.0}, f26, 16, 3), 48, 48);
}

LinkParams table1(Frequency f)
{
    LinkParams p = read_link_params(data_dir + "/table1_link_params.csv");
    p.f = f;
    return p;
}

std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

} // namespace

int main()
{
    const PanelSpec p48 = panel48();
    const PanelSpec p96 = tile_panel(p48, 2, 2);

    criterion(1, "Fraunhofer distances 4.04 m / 16.17 m within 1 %", [&](std::string& d) {
        const double d48 = fraunhofer_distance_m(p48.side_x_m(), f26);
        const double d96 = fraunhofer_distance_m(p96.side_x_m(), f26);
        d = fmt("d48 = %.4f m, d96 = %.4f m", d48, d96);
        return std::abs(d48 - 4.04) / 4.04 < 0.01 && std::abs(d96 - 16.17) / 16.17 < 0.01;
    });

    criterion(2, "supercell element period 0.2758 lambda within 0.1 %", [&](std::string& d) {
        const double ratio = p48.supercell.element_period_m / wavelength_of(f26);
        d = fmt("element period = %.6f lambda", ratio);
        return std::abs(ratio - 0.2758) / 0.2758 < 1e-3;
    });

    criterion(3, "frequency steering: peaks 65 +-0.5 / 70 +-1 / 61 +-1 deg", [&](std::string& d) {
        PatternGrid grid;
        grid.cut_only = true;
        const ElementModel elem = ElementModel::huygens();
        const double pk26 = peak_angle(synthesize_pattern(p48, elem, f26, Angle{0}, grid)).deg;
        const double pk25 = peak_angle(synthesize_pattern(
                                           p48, elem, Frequency::from_ghz(25.0), Angle{0}, grid))
                                .deg;
        const double pk27 = peak_angle(synthesize_pattern(
                                           p48, elem, Frequency::from_ghz(27.0), Angle{0}, grid))
                                .deg;
        d = fmt("peaks %.2f / %.2f / %.2f deg", pk26, pk25, pk27);
        return std::abs(pk26 - 65.0) < 0.5 && std::abs(pk25 - 70.0) < 1.0 &&
               std::abs(pk27 - 61.0) < 1.0;
    });

    criterion(4, "HPBW 9 +-1 deg (48x48) and 5 +-1 deg (96x96) at 26 GHz", [&](std::string& d) {
        PatternGrid grid;
        grid.cut_only = true;
        const ElementModel elem = ElementModel::huygens();
        const double w48 = hpbw_deg(synthesize_pattern(p48, elem, f26, Angle{0}, grid));
        const double w96 = hpbw_deg(synthesize_pattern(p96, elem, f26, Angle{0}, grid));
        d = fmt("hpbw48 = %.3f deg, hpbw96 = %.3f deg", w48, w96);
        return std::abs(w48 - 9.0) < 1.0 && std::abs(w96 - 5.0) < 1.0;
    });

    criterion(5, "method 1 / method 2 equivalence, 1000 random tuples, 1e-10", [&](std::string& d) {
        std::mt19937 rng(42);
        std::uniform_real_distribution<double> area(1e-3, 1.0), ang(-89.0, 89.0),
            freq(1.0, 100.0), dist(0.5, 100.0), gain(-5.0, 30.0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            LinkParams p;
            p.p_t = PowerLevel{gain(rng)};
            p.g_t = GainDb{gain(rng)};
            p.g_r = GainDb{gain(rng)};
            p.r1_m = dist(rng);
            p.r2_m = dist(rng);
            p.f = Frequency::from_ghz(freq(rng));
            const BistaticGeometry geom{Angle{ang(rng)}, Angle{ang(rng)}, area(rng)};
            const double sigma = bistatic_sigma_ideal(geom, p.f);
            const double product = sigma_to_gain_product(sigma, p.f);
            const double w1 = received_power_method1(p, sigma).watts();
            const double w2 =
                received_power_method2(p, GainDb::from_linear(product), GainDb{0.0}).watts();
            worst = std::max(worst, std::abs(w1 / w2 - 1.0));
        }
        d = fmt("worst relative deviation %.3e", worst);
        return worst < 1e-10;
    });

    criterion(6, "zero-reflection ray trace matches method 2 within 0.1 dB "
                 "(8 angles x 13 frequencies)",
              [&](std::string& d) {
        const Scene scene = load_scene(data_dir + "/auditorium.scene");
        AntennaNode tx;
        tx.position = scene.tx_position;
        tx.boresight = (scene.ar_position - tx.position).normalized();
        const std::vector<double> angles = {55, 60, 62.5, 65, 70, 75, 80, 85};
        double worst = 0.0;
        for (int step = 0; step <= 12; ++step) {
            const Frequency f = Frequency::from_ghz(24.5 + 0.25 * step);
            const ARNode ar = make_ar_node(scene, p96, ElementModel::huygens(), f);
            const LinkParams lp = table1(f);
            const GainDb g_rx{ar.rx_gain_dbi((tx.position - scene.ar_position).normalized())};
            for (double a : angles) {
                const double rad = deg2rad(a);
                AntennaNode rx;
                rx.position = scene.ar_position +
                              scene.rx_arc_radius_m * (std::cos(rad) * scene.ar_normal +
                                                       std::sin(rad) * scene.ar_gradient_axis);
                rx.boresight = (scene.ar_position - rx.position).normalized();
                const GainDb g_tx{
                    ar.tx_gain_dbi((rx.position - scene.ar_position).normalized())};
                const double p2 =
                    chain_terminal(received_power_method2(lp, g_rx, g_tx), lp).dbm;
                const double rt0 = simulate_ar_link(scene, tx, ar, rx, f, 0, lp).dbm;
                worst = std::max(worst, std::abs(p2 - rt0));
            }
        }
        d = fmt("worst |method2 - rt0| = %.4f dB over 104 points", worst);
        return worst < 0.1;
    });

    criterion(7, "order-3 vs order-0 received power within 1 dB at the main beam",
              [&](std::string& d) {
        const Scene scene = load_scene(data_dir + "/auditorium.scene");
        const ARNode ar = make_ar_node(scene, p48, ElementModel::huygens(), f26);
        const LinkParams lp = table1(f26);
        AntennaNode tx;
        tx.position = scene.tx_position;
        tx.boresight = (scene.ar_position - tx.position).normalized();
        const double rad = deg2rad(65.0);
        AntennaNode rx;
        rx.position = scene.ar_position +
                      scene.rx_arc_radius_m * (std::cos(rad) * scene.ar_normal +
                                               std::sin(rad) * scene.ar_gradient_axis);
        rx.boresight = (scene.ar_position - rx.position).normalized();
        const double rt0 = simulate_ar_link(scene, tx, ar, rx, f26, 0, lp).dbm;
        const double rt3 = simulate_ar_link(scene, tx, ar, rx, f26, 3, lp).dbm;
        d = fmt("rt0 = %.4f dBm, rt3 = %.4f dBm, diff = %.4f dB", rt0, rt3,
                std::abs(rt3 - rt0));
        return std::abs(rt3 - rt0) < 1.0;
    });

    criterion(8, "correction table ships as data; round-trip exact; 26 GHz/65 deg = 1.08",
              [&](std::string& d) {
        const CorrectionTable table =
            read_correction_table(data_dir + "/table2_pdiff.csv");
        if (table.size() != 21)
            return false;
        const bool entry = table.p_diff_db(26.0, 65.0) == 1.08;
        std::ostringstream out;
        write_correction_table(table, out);
        const bool bytes = out.str() == slurp(data_dir + "/table2_pdiff.csv");
        bool roundtrip = true;
        for (const auto& e : table.entries()) {
            const PowerLevel p_m{-25.0 - e.p_diff_db};
            const PowerLevel p_theory{-25.0};
            const double diff = power_difference_db(p_theory, p_m);
            const PowerLevel corrected =
                apply_correction(p_theory, table, Frequency::from_ghz(e.freq_ghz),
                                 Angle{e.angle_deg});
            roundtrip = roundtrip && std::abs(diff - e.p_diff_db) < 1e-12 &&
                        std::abs(corrected.dbm - (-25.0 - e.p_diff_db)) < 1e-12;
        }
        d = fmt("21 entries, 26/65 -> %.2f dB, byte-identical = %s", table.p_diff_db(26.0, 65.0),
                bytes ? "yes" : "no");
        return entry && bytes && roundtrip;
    });

    criterion(9, "tiling: brute-force 96x96 sum equals the factored array factor to 1e-9",
              [&](std::string& d) {
        const PhaseProfile prof48 = phase_profile(p48, Angle{0}, Angle{65}, f26);
        const PhaseProfile prof96 = phase_profile(p96, Angle{0}, Angle{65}, f26);
        const double k = 2.0 * pi / wavelength_of(f26);
        const double dx = p48.supercell.element_period_m;
        const double lx = p48.side_x_m();
        const double scale = 96.0 * 96.0;
        double worst = 0.0;
        for (double theta = -90.0; theta <= 90.0; theta += 0.2) {
            const double s = std::sin(deg2rad(theta));
            std::complex<long double> brute{0.0L, 0.0L};
            for (int n = 0; n < 96; ++n)
                for (int m = 0; m < 96; ++m) {
                    const long double ph = static_cast<long double>(k) * s * (m * dx) +
                                           prof48.phase_rad[m % 48];
                    brute += std::complex<long double>(std::cos(ph), std::sin(ph));
                }
            const Complex impl = array_factor(p96, prof96, Angle{theta}, f26);
            const Complex tile_x = 1.0 + std::polar(1.0, k * s * lx);
            const Complex factored =
                array_factor(p48, prof48, Angle{theta}, f26) * tile_x * 2.0;
            const Complex brute_d(static_cast<double>(brute.real()),
                                  static_cast<double>(brute.imag()));
            worst = std::max(worst, std::abs(brute_d - impl) / scale);
            worst = std::max(worst, std::abs(brute_d - factored) / scale);
        }
        const double side_mm = p96.side_x_m() * 1e3;
        d = fmt("worst relative deviation %.3e, tiled side %.2f mm", worst, side_mm);
        return worst < 1e-9 && std::abs(side_mm - 305.3) < 1.0;
    });

    criterion(10, "image-method oracle: mirror bounce points and absorber occlusion",
              [&](std::string& d) {
        const Scene scene = load_scene(data_dir + "/auditorium.scene");
        const Vec3 tx = scene.tx_position;
        const Vec3 ar = scene.ar_position;
        const double rad = deg2rad(65.0);
        const Vec3 rx = ar + scene.rx_arc_radius_m * (std::cos(rad) * scene.ar_normal +
                                                      std::sin(rad) * scene.ar_gradient_axis);

        // occlusion pattern of the shipped scene
        if (!los_clear(scene, tx, ar) || !los_clear(scene, ar, rx) ||
            los_clear(scene, tx, rx))
            return false;

        // first-order bounce points against hand-computed mirror images
        double worst = 0.0;
        auto check = [&](const PropagationPath& path, const Vec3& expected) {
            worst = std::max(worst, (path.points[1] - expected).norm());
        };
        const auto in = reflect_paths(scene, tx, ar, 1, f26);
        if (in.size() != 5)
            return false;
        check(in[1], Vec3{8.0, 0.0, 1.5});       // back wall: run 2.5 + 8 along y = 0
        check(in[2], Vec3{2.75, -3.0, 1.5});     // y = -3 wall: equal 3 m offsets
        check(in[3], Vec3{2.75, 0.0, 0.0});      // floor: equal 1.5 m heights
        check(in[4], Vec3{2.75, 0.0, 3.0});      // ceiling: equal 1.5 m clearances
        const auto out = reflect_paths(scene, ar, rx, 1, f26);
        if (out.size() != 6)
            return false;
        check(out[1], Vec3{8.0, 8.0 / (16.0 - rx.x()) * rx.y(), 1.5});
        check(out[2], Vec3{3.0 / (6.0 + rx.y()) * rx.x(), -3.0, 1.5});
        check(out[3], Vec3{11.0 / (22.0 - rx.y()) * rx.x(), 11.0, 1.5});
        check(out[4], Vec3{rx.x() / 2.0, rx.y() / 2.0, 0.0});
        check(out[5], Vec3{rx.x() / 2.0, rx.y() / 2.0, 3.0});
        d = fmt("worst bounce-point deviation %.3e m", worst);
        return worst < 1e-9;
    });

    std::printf("%s: %d of 10 criteria passed\n", failures == 0 ? "SUCCESS" : "FAILURE",
                10 - failures);
    return failures == 0 ? 0 : 1;
}
