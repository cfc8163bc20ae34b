// SPDX-License-Identifier: Apache-2.0

#include "ars/linkbudget.hpp"

#include <cmath>
#include <stdexcept>

namespace ars {

double bistatic_sigma_ideal(const BistaticGeometry& geom, Frequency f)
{
    if (!(geom.area_m2 > 0.0))
        throw std::domain_error("bistatic_sigma_ideal: panel area must be positive");
    if (!geom.theta_i.propagating() || !geom.theta_r.propagating())
        throw std::domain_error("bistatic_sigma_ideal: angles must be propagating");
    const double lambda = wavelength_of(f);
    return 4.0 * pi * geom.area_m2 * geom.area_m2 * std::cos(geom.theta_i.rad()) *
           std::cos(geom.theta_r.rad()) / (lambda * lambda);
}

PowerLevel received_power_method1(const LinkParams& p, double sigma_m2)
{
    if (sigma_m2 < 0.0)
        throw std::domain_error("received_power_method1: sigma must be non-negative");
    const double lambda = wavelength_of(p.f);
    const double four_pi = 4.0 * pi;
    const double w = p.p_t.watts() * p.g_t.linear() * p.g_r.linear() * sigma_m2 * lambda *
                     lambda /
                     (four_pi * four_pi * four_pi * p.r1_m * p.r1_m * p.r2_m * p.r2_m);
    return PowerLevel::from_watts(w);
}

PowerLevel received_power_method2(const LinkParams& p, GainDb g_rx, GainDb g_tx)
{
    const double lambda = wavelength_of(p.f);
    const double four_pi = 4.0 * pi;
    const double lambda4 = lambda * lambda * lambda * lambda;
    const double r_prod = p.r1_m * p.r2_m;
    const double w = p.p_t.watts() * p.g_t.linear() * g_rx.linear() * g_tx.linear() *
                     p.g_r.linear() * lambda4 /
                     (four_pi * four_pi * four_pi * four_pi * r_prod * r_prod);
    return PowerLevel::from_watts(w);
}

double sigma_to_gain_product(double sigma_m2, Frequency f)
{
    if (!(sigma_m2 > 0.0))
        throw std::domain_error("sigma_to_gain_product: sigma must be positive");
    const double lambda = wavelength_of(f);
    return 4.0 * pi * sigma_m2 / (lambda * lambda);
}

double gain_product_to_sigma(double gain_product_linear, Frequency f)
{
    if (!(gain_product_linear > 0.0))
        throw std::domain_error("gain_product_to_sigma: gain product must be positive");
    const double lambda = wavelength_of(f);
    return gain_product_linear * lambda * lambda / (4.0 * pi);
}

GainDb ideal_aperture_gain(double area_m2, Angle theta, Frequency f)
{
    if (!(area_m2 > 0.0))
        throw std::domain_error("ideal_aperture_gain: area must be positive");
    if (!theta.propagating())
        throw std::domain_error("ideal_aperture_gain: angle must be propagating");
    const double lambda = wavelength_of(f);
    return GainDb::from_linear(4.0 * pi * area_m2 * std::cos(theta.rad()) /
                               (lambda * lambda));
}

PowerLevel chain_terminal(PowerLevel p, const LinkParams& params)
{
    return PowerLevel{p.dbm - params.l_t.db + params.g_a.db};
}

PowerLevel los_reference(const LinkParams& p, double r3_m)
{
    if (!(r3_m > 0.0))
        throw std::domain_error("los_reference: distance must be positive");
    const double fspl_db = 20.0 * std::log10(wavelength_of(p.f) / (4.0 * pi * r3_m));
    return PowerLevel{p.p_t.dbm + p.g_t.db + p.g_r.db + fspl_db - p.l_t.db + p.g_a.db};
}

double power_difference_db(PowerLevel p_theory, PowerLevel p_measured)
{
    return p_theory.dbm - p_measured.dbm;
}

std::pair<std::int64_t, std::int64_t> CorrectionTable::key(double freq_ghz, double angle_deg)
{
    // exact keying at micro-resolution; table positions are coarse values
    return {std::llround(freq_ghz * 1e6), std::llround(angle_deg * 1e6)};
}

void CorrectionTable::insert(double freq_ghz, double angle_deg, double p_diff_db)
{
    if (!std::isfinite(p_diff_db) || !std::isfinite(freq_ghz) || !std::isfinite(angle_deg))
        throw std::invalid_argument("CorrectionTable: values must be finite");
    const auto k = key(freq_ghz, angle_deg);
    if (map_.count(k))
        throw std::invalid_argument("CorrectionTable: duplicate (frequency, angle) key");
    map_[k] = p_diff_db;
    entries_.push_back({freq_ghz, angle_deg, p_diff_db});
}

bool CorrectionTable::contains(double freq_ghz, double angle_deg) const
{
    return map_.count(key(freq_ghz, angle_deg)) != 0;
}

double CorrectionTable::p_diff_db(double freq_ghz, double angle_deg) const
{
    const auto it = map_.find(key(freq_ghz, angle_deg));
    if (it == map_.end())
        throw std::out_of_range("CorrectionTable: no entry for this (frequency, angle)");
    return it->second;
}

PowerLevel apply_correction(PowerLevel p_r, const CorrectionTable& table, Frequency f,
                            Angle angle)
{
    return PowerLevel{p_r.dbm - table.p_diff_db(f.ghz(), angle.deg)};
}

EvmEstimate evm_estimate(PowerLevel p_r, double bandwidth_hz, double noise_figure_db)
{
    if (!(bandwidth_hz > 0.0))
        throw std::domain_error("evm_estimate: bandwidth must be positive");
    EvmEstimate e;
    e.noise_floor_dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    e.snr_db = p_r.dbm - e.noise_floor_dbm;
    e.evm_percent = 100.0 / std::sqrt(db_to_linear(e.snr_db));
    e.pass_16qam = e.evm_percent <= evm_limit_16qam_percent;
    return e;
}

} // namespace ars
