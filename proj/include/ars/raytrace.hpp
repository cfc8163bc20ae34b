// SPDX-License-Identifier: Apache-2.0
//
// ars -- anomalous-reflector link simulation library
//
// Deterministic image-method ray tracer over planar-facet scenes. The
// reflector panel is embedded as a re-radiating node that carries two
// scattering patterns: the receive-side pattern (beamed back toward the
// illuminating Tx) and the transmit-side anomalous-deflection pattern.

#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ars/linkbudget.hpp"
#include "ars/pattern.hpp"
#include "ars/units.hpp"

namespace ars {

// Wall material with an ITU-style two-parameter conductivity model
// sigma(f) = sigma_c * f_GHz^sigma_d  [S/m].
struct Material {
    std::string name;
    double eps_r = 1.0;   // relative permittivity, real part
    double sigma_c = 0.0;
    double sigma_d = 0.0;
    bool absorber = false; // perfectly absorbing and opaque

    double conductivity_s_per_m(Frequency f) const;
};

Material concrete_material(); // eps_r 5.31, sigma 0.0326 f^0.8095

// Complex relative permittivity eps_r - j sigma / (2 pi f eps0).
std::complex<double> complex_permittivity(const Material& m, Frequency f);

// te: E perpendicular to the plane of incidence; tm: E parallel.
enum class Polarization { te, tm };

// Plane-interface reflection coefficient from air for incidence measured
// from the surface normal (0 <= angle < 90 deg).
std::complex<double> fresnel_coefficient(const Material& m, Angle incidence, Frequency f,
                                         Polarization pol);

// Planar convex polygon facet.
struct Facet {
    std::vector<Eigen::Vector3d> vertices;
    int material = 0;
    Eigen::Vector3d unit_normal{0, 0, 1};
};

// Validates vertex count, coplanarity (1e-6 m), convexity and area.
Facet make_facet(std::vector<Eigen::Vector3d> vertices, int material);

struct Scene {
    std::vector<Material> materials;
    std::vector<Facet> facets;

    // shipped measurement geometry, when the scene file declares it
    bool has_nodes = false;
    Eigen::Vector3d ar_position{0, 0, 0};
    Eigen::Vector3d ar_normal{1, 0, 0};
    Eigen::Vector3d ar_gradient_axis{0, 1, 0};
    Eigen::Vector3d tx_position{0, 0, 0};
    double rx_arc_radius_m = 0.0;

    const Material& material_of(const Facet& f) const { return materials[f.material]; }
};

// Structured-text scene file (JSON): materials[], facets[] and the optional
// node geometry block. Units meters, right-handed coordinates, +z up.
Scene load_scene(const std::string& path);

// True iff the open segment a-b intersects no facet (endpoints excluded
// with 1e-6 m tolerance).
bool los_clear(const Scene& scene, const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// One specular multipath component between two points.
struct PropagationPath {
    std::vector<Eigen::Vector3d> points;      // a, bounce..., b
    std::vector<int> facet_ids;               // one per bounce
    std::vector<double> segment_lengths_m;
    std::vector<std::complex<double>> bounce_coefficients; // pol-weighted Fresnel
    double total_length_m = 0.0;
    double gamma_power = 1.0;                 // product of per-bounce power factors
    std::complex<double> gamma_amplitude{1.0, 0.0};
    Eigen::Vector3d dir_from_a{1, 0, 0};      // unit, departure at a
    Eigen::Vector3d dir_into_b{1, 0, 0};      // unit, arrival propagation at b

    int order() const { return static_cast<int>(facet_ids.size()); }
};

// Image-method enumeration of all valid specular paths with at most
// max_order bounces (0..3). Paths are ordered by bounce count, then by the
// facet-id sequence. Absorbing facets occlude but never reflect.
std::vector<PropagationPath> reflect_paths(const Scene& scene, const Eigen::Vector3d& a,
                                           const Eigen::Vector3d& b, int max_order,
                                           Frequency f);

// Horn antenna node: gaussian main lobe with the given peak gain and
// half-power beamwidth, sidelobe floor 30 dB below the peak.
struct AntennaNode {
    Eigen::Vector3d position{0, 0, 0};
    Eigen::Vector3d boresight{1, 0, 0};
    double peak_gain_dbi = 18.0;
    double hpbw_deg = 22.0;
    double sidelobe_down_db = 30.0;
    bool isotropic = false;

    double gain_dbi(const Eigen::Vector3d& dir) const; // unit dir away from the node
};

// Dual-pattern reflector node. rx_pattern is the scattering response under
// design incidence (beamed back toward the Tx direction); tx_pattern is the
// anomalous-deflection pattern under normal incidence. Both are
// directivity-scaled and share one frequency.
struct ARNode {
    Eigen::Vector3d position{0, 0, 0};
    Eigen::Vector3d normal{1, 0, 0};
    Eigen::Vector3d gradient_axis{0, 1, 0};
    RadiationPattern rx_pattern;
    RadiationPattern tx_pattern;

    Eigen::Vector3d to_pattern_frame(const Eigen::Vector3d& dir_scene) const;
    double rx_gain_dbi(const Eigen::Vector3d& dir_scene) const;
    double tx_gain_dbi(const Eigen::Vector3d& dir_scene) const;
};

// Builds both AR patterns for the panel at frequency f and wraps them in a
// node (patterns directivity-scaled).
ARNode make_ar_node(const Scene& scene, const PanelSpec& panel, const ElementModel& element,
                    Frequency f, const PatternGrid& grid = PatternGrid{});

// Position + gain lookup pair used by the hop evaluator.
struct RadiatingNode {
    Eigen::Vector3d position;
    std::function<double(const Eigen::Vector3d&)> gain_dbi;
};

RadiatingNode as_node(const AntennaNode& antenna); // copies the antenna
// Views over the AR node; `ar` must outlive the returned node.
RadiatingNode ar_rx_node(const ARNode& ar);
RadiatingNode ar_tx_node(const ARNode& ar);

enum class Summation { incoherent, coherent };

// Received power over one hop:
//   incoherent: P = sum_paths Pt Gtx Grx (lambda / 4 pi L)^2 prod |Gamma|^2
//   coherent:   complex field sum with exp(-j k L) per path.
// Empty path list yields zero power.
double hop_power_w(const RadiatingNode& tx, const RadiatingNode& rx,
                   const std::vector<PropagationPath>& paths, Frequency f,
                   double tx_power_w, Summation mode = Summation::incoherent);

// Full Tx-AR-Rx cascade over all path pairs, with the terminal chain
// (-L_t + G_a) applied. Direct Tx-Rx leakage is excluded by construction.
// Throws if the AR patterns were not synthesized at f.
PowerLevel simulate_ar_link(const Scene& scene, const AntennaNode& tx, const ARNode& ar,
                            const AntennaNode& rx, Frequency f, int max_order,
                            const LinkParams& chain,
                            Summation mode = Summation::incoherent);

} // namespace ars
