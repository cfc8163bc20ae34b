// SPDX-License-Identifier: Apache-2.0
//
// ars -- anomalous-reflector link simulation library
//
// Finite-panel scattering pattern synthesis from supercell geometry:
// phase profiles, array factors, directivity, beamwidth and the grating
// (Floquet-harmonic) angles that set the frequency-steering behaviour.

#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ars/units.hpp"

namespace ars {

using Complex = std::complex<double>;

// Periodic supercell along the phase-gradient axis. The period follows from
// the Floquet-Bloch condition d = 4*lambda0 / |sin(theta_design)|, so the
// fourth harmonic of a normally illuminated panel lands on the design angle.
struct SupercellSpec {
    int n_elements = 16;            // unit cells per supercell period
    double period_m = 0.0;          // supercell period d
    double element_period_m = 0.0;  // d / n_elements, square unit cells
    Frequency design_frequency;
    Angle design_angle;             // deflection of normal incidence at f0
    int quantization_bits = 3;      // reactive-load phase resolution
};

SupercellSpec design_supercell(Angle design_angle, Frequency f0,
                               int n_elements = 16, int quantization_bits = 3);

// Rectangular panel of nx x ny unit cells built from one supercell design.
struct PanelSpec {
    SupercellSpec supercell;
    int nx = 0; // unit-cell columns along the gradient axis
    int ny = 0; // unit-cell rows along the uniform axis

    double side_x_m() const { return nx * supercell.element_period_m; }
    double side_y_m() const { return ny * supercell.element_period_m; }
    double area_m2() const { return side_x_m() * side_y_m(); }
};

PanelSpec make_panel(const SupercellSpec& cell, int nx, int ny);

// Seamless tiling of identical panels; element layout stays continuous.
PanelSpec tile_panel(const PanelSpec& base, int mx, int my);

// Reflection phase per unit-cell column, wrapped to [0, 2*pi).
// quantization_bits == 0 means continuous (unquantized) phases.
struct PhaseProfile {
    Eigen::ArrayXd phase_rad;
    int quantization_bits = 0;
};

// Linear gradient phi(x_m) = -k0 (sin theta_r - sin theta_i) x_m, wrapped and
// rounded to the nearest of 2^bits levels (half away from zero).
PhaseProfile phase_profile(const PanelSpec& panel, Angle theta_i, Angle theta_r,
                           Frequency f0);
PhaseProfile phase_profile(const PanelSpec& panel, Angle theta_i, Angle theta_r,
                           Frequency f0, int quantization_bits);

// All-zero profile (broadside reference).
PhaseProfile uniform_profile(const PanelSpec& panel);

// In-plane array factor AF(theta) = ny * sum_m exp(j (k sin(theta) x_m + phi_m)).
Complex array_factor(const PanelSpec& panel, const PhaseProfile& profile,
                     Angle theta_obs, Frequency f);

enum class Normalization { raw, peak, directivity };

// Complex far-field amplitude on a regular angular grid.
//
// theta is the signed polar angle in the gradient plane (-90..90 deg, 0 at
// the panel normal); phi rotates the cut about the normal over a half turn
// (0..180 deg), so the (theta, phi) grid covers the front hemisphere once:
//   u(theta, phi) = (sin t cos p, sin t sin p, cos t).
// A single phi entry marks an in-plane cut. Nothing radiates behind the
// panel (ground-plane-backed reflector).
struct RadiationPattern {
    Frequency frequency;
    Eigen::ArrayXd theta_deg;   // strictly increasing
    Eigen::ArrayXd phi_deg;     // strictly increasing; single 0 for cuts
    Eigen::ArrayXXcd values;    // theta x phi
    Normalization norm = Normalization::raw;

    bool is_cut() const { return phi_deg.size() == 1; }
};

// Unit-cell re-radiation model used when no simulated element pattern is
// available. The default is the Huygens aperture-element obliquity
// (1 + cos theta)/2 in amplitude; cosine(q) gives a cos^q power pattern.
class ElementModel {
public:
    static ElementModel isotropic();
    static ElementModel cosine(double power_exponent = 1.0);
    static ElementModel huygens();
    static ElementModel imported(RadiationPattern element);

    Complex amplitude(double theta_rad, double phi_rad) const;

    // Throws if an imported grid does not cover theta -90..90.
    void validate_coverage() const;

private:
    enum class Kind { isotropic, cosine, huygens, imported };
    Kind kind_ = Kind::huygens;
    double power_exponent_ = 1.0;
    std::shared_ptr<const RadiationPattern> element_;
};

struct PatternGrid {
    double theta_step_deg = 0.1; // resolves the 96x96 panel's 5 deg beam
    double phi_step_deg = 1.0;
    bool cut_only = false;       // phi = {0} only
};

// Far-field pattern of the panel under plane-wave illumination from
// `incidence`: value = element(dir) * AF_x(k(u - sin theta_i)) * AF_y(k v).
// The returned pattern is raw (unnormalized).
RadiationPattern synthesize_pattern(const PanelSpec& panel, const ElementModel& element,
                                    const PhaseProfile& profile, Frequency f,
                                    Angle incidence = Angle{0.0},
                                    const PatternGrid& grid = PatternGrid{});

// Convenience overload: hardware profile from the panel's own design
// (normal incidence deflected to the design angle, quantized).
RadiationPattern synthesize_pattern(const PanelSpec& panel, const ElementModel& element,
                                    Frequency f, Angle incidence = Angle{0.0},
                                    const PatternGrid& grid = PatternGrid{});

// Hemisphere integral of |F|^2 over solid angle (trapezoidal quadrature).
double radiated_power_integral(const RadiationPattern& pattern);

// Peak directivity in dBi: D = 4 pi |F|^2_max / integral(|F|^2 dOmega).
double directivity_dbi(const RadiationPattern& pattern);

// Rescales values so |F(dir)|^2 is the directivity toward dir.
RadiationPattern with_directivity_scaling(RadiationPattern pattern);

// Gain from directivity with radiation efficiency e_cd (G = e_cd * D).
GainDb gain_from_directivity(double directivity_dbi, double e_cd = 1.0);

// Lookup helpers on a directivity-scaled pattern. Directions are unit
// vectors in the pattern frame (+z panel normal, +x gradient axis).
// Directions behind the panel return zero power / -inf dBi.
double pattern_power_at(const RadiationPattern& pattern, double theta_deg, double phi_deg);
double pattern_gain_dbi(const RadiationPattern& pattern, const Eigen::Vector3d& dir);
Complex pattern_value_at(const RadiationPattern& pattern, const Eigen::Vector3d& dir);

// Peak direction of the in-plane cut (parabolic refinement between samples).
Angle peak_angle(const RadiationPattern& pattern);

// Half-power beamwidth of the in-plane cut: width between the two -3 dB
// crossings bracketing the global peak, linearly interpolated.
double hpbw_deg(const RadiationPattern& pattern);

struct GratingAngle {
    int order = 0;
    Angle angle;
};

// All propagating Floquet orders: sin theta_n = sin theta_i + n lambda / d.
std::vector<GratingAngle> grating_angles(Angle theta_i, double period_m, Frequency f);

// Far-field boundary 2 D^2 / lambda for aperture extent D (panel side).
double fraunhofer_distance_m(double aperture_extent_m, Frequency f);

} // namespace ars
