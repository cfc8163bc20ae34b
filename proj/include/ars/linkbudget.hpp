// SPDX-License-Identifier: Apache-2.0
//
// ars -- anomalous-reflector link simulation library
//
// Received power through Tx-AR-Rx links: the bistatic-cross-section route
// (method 1), the panel-gain Friis cascade (method 2), the line-of-sight
// reference and the measurement-correction pipeline.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ars/units.hpp"

namespace ars {

// Measured link budget: transmit power, horn gains, terminal chain and the
// two hop distances.
struct LinkParams {
    PowerLevel p_t;     // transmit power
    GainDb g_t;         // Tx antenna gain
    GainDb g_r;         // Rx antenna gain
    GainDb l_t;         // cable loss at the Tx side, stored positive, subtracted
    GainDb g_a;         // LNA gain plus cable loss at the Rx side
    double r1_m = 0.0;  // Tx - AR distance
    double r2_m = 0.0;  // AR - Rx distance
    Frequency f;
};

struct BistaticGeometry {
    Angle theta_i;
    Angle theta_r;
    double area_m2 = 0.0; // illuminated panel area
};

// Ideal lossless anomalous reflector: sigma = 4 pi A^2 cos(ti) cos(tr) / lambda^2.
// Reduces to the flat-plate specular RCS at ti = tr = 0 and is consistent
// with ideal-aperture panel gains through the sigma <-> gain relation below.
double bistatic_sigma_ideal(const BistaticGeometry& geom, Frequency f);

// Radar-equation form: P1 = Pt Gt Gr sigma lambda^2 / ((4 pi)^3 R1^2 R2^2).
PowerLevel received_power_method1(const LinkParams& p, double sigma_m2);

// Friis cascade with panel gains toward Tx and Rx:
// P2 = Pt Gt Grx Gtx Gr lambda^4 / ((4 pi)^4 (R1 R2)^2).
PowerLevel received_power_method2(const LinkParams& p, GainDb g_rx, GainDb g_tx);

// Grx * Gtx = 4 pi sigma / lambda^2 (linear) and its inverse.
double sigma_to_gain_product(double sigma_m2, Frequency f);
double gain_product_to_sigma(double gain_product_linear, Frequency f);

// Ideal-aperture panel gain 4 pi A cos(theta) / lambda^2.
GainDb ideal_aperture_gain(double area_m2, Angle theta, Frequency f);

// Terminal chain of the measurement setup: P_r = P - L_t + G_a.
PowerLevel chain_terminal(PowerLevel p, const LinkParams& params);

// Friis line-of-sight reference over the direct Tx-Rx distance R3:
// P_theory = Pt + Gt + Gr + 20 log10(lambda / (4 pi R3)) - L_t + G_a.
PowerLevel los_reference(const LinkParams& p, double r3_m);

// P_diff = P_theory - P_m (sign preserved).
double power_difference_db(PowerLevel p_theory, PowerLevel p_measured);

// Per-position calibration offsets keyed exactly by (frequency, angle);
// no interpolation across angles.
class CorrectionTable {
public:
    void insert(double freq_ghz, double angle_deg, double p_diff_db);
    bool contains(double freq_ghz, double angle_deg) const;
    double p_diff_db(double freq_ghz, double angle_deg) const; // throws std::out_of_range

    struct Entry {
        double freq_ghz;
        double angle_deg;
        double p_diff_db;
    };
    const std::vector<Entry>& entries() const { return entries_; } // insertion order
    std::size_t size() const { return entries_.size(); }

private:
    static std::pair<std::int64_t, std::int64_t> key(double freq_ghz, double angle_deg);
    std::map<std::pair<std::int64_t, std::int64_t>, double> map_;
    std::vector<Entry> entries_;
};

// P_correct = P_r - P_diff(f, angle).
PowerLevel apply_correction(PowerLevel p_r, const CorrectionTable& table, Frequency f,
                            Angle angle);

// SNR-only EVM estimator against the thermal noise floor
// N = -174 dBm/Hz + 10 log10(BW) + NF; EVM_rms% = 100 / sqrt(SNR_linear).
// This approximates receiver-noise-limited EVM; it carries no distortion terms.
struct EvmEstimate {
    double noise_floor_dbm = 0.0;
    double snr_db = 0.0;
    double evm_percent = 0.0;
    bool pass_16qam = false; // EVM <= 12.5 %
};

EvmEstimate evm_estimate(PowerLevel p_r, double bandwidth_hz, double noise_figure_db);

inline constexpr double evm_limit_16qam_percent = 12.5;

} // namespace ars
