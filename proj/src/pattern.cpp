// SPDX-License-Identifier: Apache-2.0

#include "ars/pattern.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ars/parallel.hpp"

namespace ars {

namespace {

double wrap_two_pi(double x)
{
    double w = std::fmod(x, 2.0 * pi);
    if (w < 0.0)
        w += 2.0 * pi;
    if (w >= 2.0 * pi)
        w = 0.0;
    return w;
}

// Nearest of 2^bits levels, ties rounded half away from zero.
double quantize_phase(double phase, int bits)
{
    const long long levels = 1ll << bits;
    const double step = 2.0 * pi / static_cast<double>(levels);
    long long q = std::llround(phase / step) % levels;
    return static_cast<double>(q) * step;
}

// sum_m phasor_m * exp(j * ku_dx * m), incremental rotor instead of a trig
// call per column.
Complex af_gradient_axis(double ku_dx, const Eigen::ArrayXcd& cell_phasors)
{
    const Complex rot = std::polar(1.0, ku_dx);
    Complex r{1.0, 0.0};
    Complex acc{0.0, 0.0};
    for (Eigen::Index m = 0; m < cell_phasors.size(); ++m) {
        acc += cell_phasors[m] * r;
        r *= rot;
    }
    return acc;
}

// sum_n exp(j * kv_dy * n) for n = 0..ny-1 (uniform axis, closed form).
Complex af_uniform_axis(double kv_dy, int ny)
{
    const double a = 0.5 * kv_dy;
    const double sa = std::sin(a);
    if (std::abs(sa) < 1e-9) {
        Complex acc{0.0, 0.0};
        for (int n = 0; n < ny; ++n)
            acc += std::polar(1.0, kv_dy * n);
        return acc;
    }
    return std::polar(1.0, (ny - 1.0) * a) * (std::sin(ny * a) / sa);
}

Eigen::ArrayXcd cell_phasors_of(const PhaseProfile& profile)
{
    Eigen::ArrayXcd ph(profile.phase_rad.size());
    for (Eigen::Index m = 0; m < ph.size(); ++m)
        ph[m] = std::polar(1.0, profile.phase_rad[m]);
    return ph;
}

Eigen::ArrayXd linspace_deg(double lo, double hi, double step)
{
    const auto n = static_cast<Eigen::Index>(std::lround((hi - lo) / step)) + 1;
    Eigen::ArrayXd g(n);
    for (Eigen::Index i = 0; i < n; ++i)
        g[i] = lo + i * step;
    g[n - 1] = hi;
    return g;
}

Eigen::Index lower_cell(const Eigen::ArrayXd& grid, double x)
{
    const double* begin = grid.data();
    const double* end = begin + grid.size();
    auto it = std::upper_bound(begin, end, x);
    Eigen::Index i = std::distance(begin, it) - 1;
    return std::clamp<Eigen::Index>(i, 0, grid.size() - 2);
}

// Bilinear interpolation of the complex amplitude; x clamped to the grid.
Complex interp_complex(const RadiationPattern& pat, double t_deg, double p_deg)
{
    const auto& tg = pat.theta_deg;
    const auto& pg = pat.phi_deg;
    const double t = std::clamp(t_deg, tg[0], tg[tg.size() - 1]);
    const Eigen::Index it = tg.size() > 1 ? lower_cell(tg, t) : 0;
    const double wt = tg.size() > 1 ? (t - tg[it]) / (tg[it + 1] - tg[it]) : 0.0;

    if (pg.size() == 1) {
        if (tg.size() == 1)
            return pat.values(0, 0);
        return (1.0 - wt) * pat.values(it, 0) + wt * pat.values(it + 1, 0);
    }
    const double p = std::clamp(p_deg, pg[0], pg[pg.size() - 1]);
    const Eigen::Index ip = lower_cell(pg, p);
    const double wp = (p - pg[ip]) / (pg[ip + 1] - pg[ip]);
    const Complex a = (1.0 - wt) * pat.values(it, ip) + wt * pat.values(it + 1, ip);
    const Complex b = (1.0 - wt) * pat.values(it, ip + 1) + wt * pat.values(it + 1, ip + 1);
    return (1.0 - wp) * a + wp * b;
}

// Same cell walk on |F|^2; gain lookups interpolate power directly so that
// phase rotation between adjacent cells cannot fake a null.
double interp_power(const RadiationPattern& pat, double t_deg, double p_deg)
{
    const auto& tg = pat.theta_deg;
    const auto& pg = pat.phi_deg;
    const double t = std::clamp(t_deg, tg[0], tg[tg.size() - 1]);
    const Eigen::Index it = tg.size() > 1 ? lower_cell(tg, t) : 0;
    const double wt = tg.size() > 1 ? (t - tg[it]) / (tg[it + 1] - tg[it]) : 0.0;
    auto pw = [&](Eigen::Index i, Eigen::Index j) { return std::norm(pat.values(i, j)); };

    if (pg.size() == 1) {
        if (tg.size() == 1)
            return pw(0, 0);
        return (1.0 - wt) * pw(it, 0) + wt * pw(it + 1, 0);
    }
    const double p = std::clamp(p_deg, pg[0], pg[pg.size() - 1]);
    const Eigen::Index ip = lower_cell(pg, p);
    const double wp = (p - pg[ip]) / (pg[ip + 1] - pg[ip]);
    const double a = (1.0 - wt) * pw(it, ip) + wt * pw(it + 1, ip);
    const double b = (1.0 - wt) * pw(it, ip + 1) + wt * pw(it + 1, ip + 1);
    return (1.0 - wp) * a + wp * b;
}

// Signed-theta / half-turn-phi representative of a unit direction.
// Returns false for directions behind the panel.
bool direction_to_grid(const Eigen::Vector3d& dir, double& t_deg, double& p_deg)
{
    const Eigen::Vector3d u = dir.normalized();
    if (u.z() < -1e-12)
        return false;
    const double polar = rad2deg(std::acos(std::clamp(u.z(), -1.0, 1.0)));
    double azim = std::atan2(u.y(), u.x());
    if (azim < 0.0)
        azim += 2.0 * pi;
    if (azim < pi) {
        t_deg = polar;
        p_deg = rad2deg(azim);
    } else {
        t_deg = -polar;
        p_deg = rad2deg(azim - pi);
    }
    return true;
}

} // namespace

SupercellSpec design_supercell(Angle design_angle, Frequency f0, int n_elements,
                               int quantization_bits)
{
    if (n_elements < 2)
        throw std::invalid_argument("design_supercell: need at least two elements");
    if (quantization_bits < 0 || quantization_bits > 16)
        throw std::invalid_argument("design_supercell: unsupported quantization depth");
    if (std::abs(design_angle.deg) > 90.0)
        throw std::domain_error("design_supercell: design angle must be within +-90 deg");
    const double s = std::abs(std::sin(design_angle.rad()));
    if (s == 0.0)
        throw std::domain_error("design_supercell: zero design angle gives an infinite period");
    const double d = 4.0 * wavelength_of(f0) / s;
    return SupercellSpec{n_elements, d, d / n_elements, f0, design_angle, quantization_bits};
}

PanelSpec make_panel(const SupercellSpec& cell, int nx, int ny)
{
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("make_panel: panel dimensions must be positive");
    if (nx % cell.n_elements != 0)
        throw std::invalid_argument("make_panel: nx must be a whole number of supercells");
    return PanelSpec{cell, nx, ny};
}

PanelSpec tile_panel(const PanelSpec& base, int mx, int my)
{
    if (mx < 1 || my < 1)
        throw std::invalid_argument("tile_panel: tile counts must be >= 1");
    PanelSpec tiled = base;
    tiled.nx = base.nx * mx;
    tiled.ny = base.ny * my;
    return tiled;
}

PhaseProfile phase_profile(const PanelSpec& panel, Angle theta_i, Angle theta_r,
                           Frequency f0)
{
    return phase_profile(panel, theta_i, theta_r, f0, panel.supercell.quantization_bits);
}

PhaseProfile phase_profile(const PanelSpec& panel, Angle theta_i, Angle theta_r,
                           Frequency f0, int quantization_bits)
{
    if (!theta_i.propagating() || !theta_r.propagating())
        throw std::domain_error("phase_profile: both angles must be propagating");
    const double k0 = 2.0 * pi / wavelength_of(f0);
    const double gradient = std::sin(theta_r.rad()) - std::sin(theta_i.rad());
    const double dx = panel.supercell.element_period_m;
    Eigen::ArrayXd phases(panel.nx);
    for (int m = 0; m < panel.nx; ++m) {
        const double raw = wrap_two_pi(-k0 * gradient * (m * dx));
        phases[m] = quantization_bits > 0 ? quantize_phase(raw, quantization_bits) : raw;
    }
    return PhaseProfile{std::move(phases), quantization_bits};
}

PhaseProfile uniform_profile(const PanelSpec& panel)
{
    return PhaseProfile{Eigen::ArrayXd::Zero(panel.nx), 0};
}

Complex array_factor(const PanelSpec& panel, const PhaseProfile& profile,
                     Angle theta_obs, Frequency f)
{
    if (profile.phase_rad.size() != panel.nx)
        throw std::invalid_argument("array_factor: profile size does not match panel columns");
    const double k = 2.0 * pi / wavelength_of(f);
    const double u = std::sin(theta_obs.rad());
    const Eigen::ArrayXcd phasors = cell_phasors_of(profile);
    return af_gradient_axis(k * u * panel.supercell.element_period_m, phasors) *
           static_cast<double>(panel.ny);
}

ElementModel ElementModel::isotropic()
{
    ElementModel e;
    e.kind_ = Kind::isotropic;
    return e;
}

ElementModel ElementModel::cosine(double power_exponent)
{
    if (!(power_exponent > 0.0))
        throw std::invalid_argument("ElementModel::cosine: exponent must be positive");
    ElementModel e;
    e.kind_ = Kind::cosine;
    e.power_exponent_ = power_exponent;
    return e;
}

ElementModel ElementModel::huygens()
{
    ElementModel e;
    e.kind_ = Kind::huygens;
    return e;
}

ElementModel ElementModel::imported(RadiationPattern element)
{
    ElementModel e;
    e.kind_ = Kind::imported;
    e.element_ = std::make_shared<RadiationPattern>(std::move(element));
    return e;
}

void ElementModel::validate_coverage() const
{
    if (kind_ != Kind::imported)
        return;
    const auto& tg = element_->theta_deg;
    if (tg.size() < 2 || tg[0] > -90.0 + 1e-9 || tg[tg.size() - 1] < 90.0 - 1e-9)
        throw std::invalid_argument("element pattern grid must cover theta -90..90 deg");
}

Complex ElementModel::amplitude(double theta_rad, double phi_rad) const
{
    switch (kind_) {
    case Kind::isotropic:
        return {1.0, 0.0};
    case Kind::cosine: {
        const double c = std::cos(theta_rad);
        if (c <= 0.0)
            return {0.0, 0.0};
        return {std::pow(c, 0.5 * power_exponent_), 0.0};
    }
    case Kind::huygens:
        return {0.5 * (1.0 + std::cos(theta_rad)), 0.0};
    case Kind::imported:
        return interp_complex(*element_, rad2deg(theta_rad), rad2deg(phi_rad));
    }
    return {0.0, 0.0};
}

RadiationPattern synthesize_pattern(const PanelSpec& panel, const ElementModel& element,
                                    const PhaseProfile& profile, Frequency f,
                                    Angle incidence, const PatternGrid& grid)
{
    if (profile.phase_rad.size() != panel.nx)
        throw std::invalid_argument("synthesize_pattern: profile size does not match panel");
    if (!incidence.propagating())
        throw std::domain_error("synthesize_pattern: incidence must be propagating");
    element.validate_coverage();

    const double k = 2.0 * pi / wavelength_of(f);
    const double dx = panel.supercell.element_period_m;
    const double dy = dx;
    const double sin_inc = std::sin(incidence.rad());
    const Eigen::ArrayXcd phasors = cell_phasors_of(profile);

    RadiationPattern out;
    out.frequency = f;
    out.theta_deg = linspace_deg(-90.0, 90.0, grid.theta_step_deg);
    out.phi_deg = grid.cut_only ? Eigen::ArrayXd::Zero(1).eval()
                                : linspace_deg(0.0, 180.0, grid.phi_step_deg);
    out.values.resize(out.theta_deg.size(), out.phi_deg.size());
    out.norm = Normalization::raw;

    const Eigen::Index nt = out.theta_deg.size();
    detail::parallel_for(static_cast<std::size_t>(out.phi_deg.size()), [&](std::size_t ip) {
        const double p = deg2rad(out.phi_deg[static_cast<Eigen::Index>(ip)]);
        const double cp = std::cos(p);
        const double sp = std::sin(p);
        for (Eigen::Index it = 0; it < nt; ++it) {
            const double t = deg2rad(out.theta_deg[it]);
            const double st = std::sin(t);
            const double u = st * cp - sin_inc; // gradient axis, incidence removed
            const double v = st * sp;
            const Complex af = af_gradient_axis(k * u * dx, phasors) *
                               af_uniform_axis(k * v * dy, panel.ny);
            out.values(it, static_cast<Eigen::Index>(ip)) = element.amplitude(t, p) * af;
        }
    });
    return out;
}

RadiationPattern synthesize_pattern(const PanelSpec& panel, const ElementModel& element,
                                    Frequency f, Angle incidence, const PatternGrid& grid)
{
    const PhaseProfile hw = phase_profile(panel, Angle{0.0}, panel.supercell.design_angle,
                                          panel.supercell.design_frequency);
    return synthesize_pattern(panel, element, hw, f, incidence, grid);
}

double radiated_power_integral(const RadiationPattern& pat)
{
    if (pat.is_cut())
        throw std::invalid_argument("radiated_power_integral: needs a (theta, phi) grid");
    const Eigen::Index nt = pat.theta_deg.size();
    const Eigen::Index np = pat.phi_deg.size();

    // inner trapezoid over theta of |F|^2 |sin t|, outer over phi
    Eigen::ArrayXd per_phi = Eigen::ArrayXd::Zero(np);
    for (Eigen::Index ip = 0; ip < np; ++ip) {
        double acc = 0.0;
        double prev = std::norm(pat.values(0, ip)) * std::abs(std::sin(deg2rad(pat.theta_deg[0])));
        for (Eigen::Index it = 1; it < nt; ++it) {
            const double cur =
                std::norm(pat.values(it, ip)) * std::abs(std::sin(deg2rad(pat.theta_deg[it])));
            acc += 0.5 * (prev + cur) * deg2rad(pat.theta_deg[it] - pat.theta_deg[it - 1]);
            prev = cur;
        }
        per_phi[ip] = acc;
    }
    double total = 0.0;
    for (Eigen::Index ip = 1; ip < np; ++ip)
        total += 0.5 * (per_phi[ip - 1] + per_phi[ip]) * deg2rad(pat.phi_deg[ip] - pat.phi_deg[ip - 1]);
    return total;
}

double directivity_dbi(const RadiationPattern& pat)
{
    const double peak = pat.values.abs2().maxCoeff();
    if (peak <= 0.0)
        throw std::domain_error("directivity_dbi: all-zero pattern");
    if (pat.norm == Normalization::directivity)
        return 10.0 * std::log10(peak);
    const double integral = radiated_power_integral(pat);
    return 10.0 * std::log10(4.0 * pi * peak / integral);
}

RadiationPattern with_directivity_scaling(RadiationPattern pat)
{
    if (pat.norm == Normalization::directivity)
        return pat;
    const double integral = radiated_power_integral(pat);
    if (!(integral > 0.0))
        throw std::domain_error("with_directivity_scaling: all-zero pattern");
    pat.values *= std::sqrt(4.0 * pi / integral);
    pat.norm = Normalization::directivity;
    return pat;
}

GainDb gain_from_directivity(double directivity_dbi, double e_cd)
{
    if (!(e_cd > 0.0) || e_cd > 1.0)
        throw std::invalid_argument("gain_from_directivity: efficiency must be in (0, 1]");
    return GainDb{directivity_dbi + 10.0 * std::log10(e_cd)};
}

double pattern_power_at(const RadiationPattern& pat, double theta_deg, double phi_deg)
{
    return interp_power(pat, theta_deg, phi_deg);
}

double pattern_gain_dbi(const RadiationPattern& pat, const Eigen::Vector3d& dir)
{
    if (pat.norm != Normalization::directivity)
        throw std::invalid_argument("pattern_gain_dbi: pattern must be directivity-scaled");
    double t = 0.0, p = 0.0;
    if (!direction_to_grid(dir, t, p))
        return -std::numeric_limits<double>::infinity();
    const double power = interp_power(pat, t, p);
    if (power <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(power);
}

Complex pattern_value_at(const RadiationPattern& pat, const Eigen::Vector3d& dir)
{
    double t = 0.0, p = 0.0;
    if (!direction_to_grid(dir, t, p))
        return {0.0, 0.0};
    return interp_complex(pat, t, p);
}

Angle peak_angle(const RadiationPattern& pat)
{
    const Eigen::Index nt = pat.theta_deg.size();
    Eigen::Index best = 0;
    double best_power = -1.0;
    for (Eigen::Index it = 0; it < nt; ++it) {
        const double pw = std::norm(pat.values(it, 0));
        if (pw > best_power) {
            best_power = pw;
            best = it;
        }
    }
    if (best_power <= 0.0)
        throw std::domain_error("peak_angle: all-zero cut");
    if (best == 0 || best == nt - 1)
        return Angle{pat.theta_deg[best]};
    // parabolic refinement on power samples
    const double pm = std::norm(pat.values(best - 1, 0));
    const double pc = best_power;
    const double pp = std::norm(pat.values(best + 1, 0));
    const double denom = pm - 2.0 * pc + pp;
    double delta = 0.0;
    if (denom < 0.0)
        delta = 0.5 * (pm - pp) / denom;
    const double h = pat.theta_deg[best + 1] - pat.theta_deg[best];
    return Angle{pat.theta_deg[best] + delta * h};
}

double hpbw_deg(const RadiationPattern& pat)
{
    const Eigen::Index nt = pat.theta_deg.size();
    Eigen::Index peak = 0;
    double peak_power = -1.0;
    for (Eigen::Index it = 0; it < nt; ++it) {
        const double pw = std::norm(pat.values(it, 0));
        if (pw > peak_power) {
            peak_power = pw;
            peak = it;
        }
    }
    if (peak_power <= 0.0)
        throw std::domain_error("hpbw_deg: all-zero cut");
    const double half = 0.5 * peak_power;

    auto power = [&](Eigen::Index i) { return std::norm(pat.values(i, 0)); };
    double right = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = peak; i + 1 < nt; ++i) {
        if (power(i + 1) <= half) {
            const double w = (power(i) - half) / (power(i) - power(i + 1));
            right = pat.theta_deg[i] + w * (pat.theta_deg[i + 1] - pat.theta_deg[i]);
            break;
        }
    }
    double left = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = peak; i > 0; --i) {
        if (power(i - 1) <= half) {
            const double w = (power(i) - half) / (power(i) - power(i - 1));
            left = pat.theta_deg[i] - w * (pat.theta_deg[i] - pat.theta_deg[i - 1]);
            break;
        }
    }
    if (std::isnan(left) || std::isnan(right))
        throw std::runtime_error("hpbw_deg: -3 dB level never crossed within the cut");
    return right - left;
}

std::vector<GratingAngle> grating_angles(Angle theta_i, double period_m, Frequency f)
{
    if (!(period_m > 0.0))
        throw std::domain_error("grating_angles: period must be positive");
    const double s0 = std::sin(theta_i.rad());
    const double ratio = wavelength_of(f) / period_m;
    const int n_min = static_cast<int>(std::ceil((-1.0 - s0) / ratio - 1e-12));
    const int n_max = static_cast<int>(std::floor((1.0 - s0) / ratio + 1e-12));
    std::vector<GratingAngle> out;
    out.reserve(n_max - n_min + 1);
    for (int n = n_min; n <= n_max; ++n) {
        const double s = std::clamp(s0 + n * ratio, -1.0, 1.0);
        out.push_back({n, Angle::from_rad(std::asin(s))});
    }
    return out;
}

double fraunhofer_distance_m(double aperture_extent_m, Frequency f)
{
    if (!(aperture_extent_m > 0.0))
        throw std::domain_error("fraunhofer_distance_m: aperture extent must be positive");
    return 2.0 * aperture_extent_m * aperture_extent_m / wavelength_of(f);
}

} // namespace ars
