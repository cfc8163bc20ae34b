// SPDX-License-Identifier: Apache-2.0

#include "ars/raytrace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ars {

namespace {

constexpr double endpoint_tol_m = 1e-6;  // endpoint exclusion for occlusion tests
constexpr double containment_tol_m = 1e-9;
constexpr double coplanar_tol_m = 1e-6;

using Vec3 = Eigen::Vector3d;

Vec3 newell_normal(const std::vector<Vec3>& vs)
{
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Vec3& a = vs[i];
        const Vec3& b = vs[(i + 1) % vs.size()];
        n.x() += (a.y() - b.y()) * (a.z() + b.z());
        n.y() += (a.z() - b.z()) * (a.x() + b.x());
        n.z() += (a.x() - b.x()) * (a.y() + b.y());
    }
    return n;
}

bool point_in_facet(const Facet& f, const Vec3& p)
{
    const std::size_t n = f.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = f.vertices[i];
        const Vec3& b = f.vertices[(i + 1) % n];
        const Vec3 edge = (b - a).normalized();
        const Vec3 inward = f.unit_normal.cross(edge); // CCW winding wrt the normal
        if ((p - a).dot(inward) < -containment_tol_m)
            return false;
    }
    return true;
}

bool segment_hits_facet(const Facet& f, const Vec3& a, const Vec3& b)
{
    const Vec3 d = b - a;
    const double len = d.norm();
    if (len < endpoint_tol_m)
        return false;
    const double denom = d.dot(f.unit_normal);
    if (std::abs(denom) < 1e-15 * len)
        return false; // parallel / grazing along the plane
    const double t = (f.vertices[0] - a).dot(f.unit_normal) / denom;
    const double t_tol = endpoint_tol_m / len;
    if (t <= t_tol || t >= 1.0 - t_tol)
        return false;
    return point_in_facet(f, a + t * d);
}

Vec3 mirror_point(const Vec3& p, const Facet& f)
{
    const double dist = (p - f.vertices[0]).dot(f.unit_normal);
    return p - 2.0 * dist * f.unit_normal;
}

// Vertical-polarization weight of the TE (s) component at one bounce:
// the square of the projection of global vertical onto the s basis.
double te_weight(const Vec3& incident_dir, const Vec3& facet_normal)
{
    Vec3 s = incident_dir.cross(facet_normal);
    const double sn = s.norm();
    if (sn < 1e-9)
        return 1.0; // normal incidence: TE and TM coincide in magnitude
    s /= sn;
    const double c = Vec3::UnitZ().dot(s);
    return c * c;
}

} // namespace

double Material::conductivity_s_per_m(Frequency f) const
{
    return sigma_c * std::pow(f.ghz(), sigma_d);
}

Material concrete_material()
{
    return Material{"concrete", 5.31, 0.0326, 0.8095, false};
}

std::complex<double> complex_permittivity(const Material& m, Frequency f)
{
    const double sigma = m.conductivity_s_per_m(f);
    return {m.eps_r, -sigma / (2.0 * pi * f.hz * vacuum_permittivity)};
}

std::complex<double> fresnel_coefficient(const Material& m, Angle incidence, Frequency f,
                                         Polarization pol)
{
    if (incidence.deg < 0.0 || incidence.deg >= 90.0)
        throw std::domain_error("fresnel_coefficient: incidence must be in [0, 90) deg");
    if (m.absorber)
        return {0.0, 0.0};
    const std::complex<double> eps = complex_permittivity(m, f);
    const double ci = std::cos(incidence.rad());
    const double si = std::sin(incidence.rad());
    const std::complex<double> root = std::sqrt(eps - si * si);
    if (pol == Polarization::te)
        return (ci - root) / (ci + root);
    return (eps * ci - root) / (eps * ci + root);
}

Facet make_facet(std::vector<Eigen::Vector3d> vertices, int material)
{
    if (vertices.size() < 3)
        throw std::invalid_argument("make_facet: a facet needs at least three vertices");
    Vec3 n = newell_normal(vertices);
    const double area2 = n.norm(); // twice the polygon area
    if (area2 < 1e-12)
        throw std::invalid_argument("make_facet: degenerate facet (zero area)");
    n /= area2;

    for (const Vec3& v : vertices)
        if (std::abs((v - vertices[0]).dot(n)) > coplanar_tol_m)
            throw std::invalid_argument("make_facet: vertices are not coplanar within 1e-6 m");

    const std::size_t cnt = vertices.size();
    for (std::size_t i = 0; i < cnt; ++i) {
        const Vec3 e0 = vertices[(i + 1) % cnt] - vertices[i];
        const Vec3 e1 = vertices[(i + 2) % cnt] - vertices[(i + 1) % cnt];
        if (e0.cross(e1).dot(n) < -1e-9)
            throw std::invalid_argument("make_facet: polygon must be convex");
    }

    Facet f;
    f.vertices = std::move(vertices);
    f.material = material;
    f.unit_normal = n;
    return f;
}

bool los_clear(const Scene& scene, const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    if ((a - b).norm() < endpoint_tol_m)
        throw std::invalid_argument("los_clear: endpoints must be distinct");
    for (const Facet& f : scene.facets)
        if (segment_hits_facet(f, a, b))
            return false;
    return true;
}

namespace {

bool segment_clear(const Scene& scene, const Vec3& a, const Vec3& b)
{
    for (const Facet& f : scene.facets)
        if (segment_hits_facet(f, a, b))
            return false;
    return true;
}

// Geometric backtrace of one facet sequence; returns false when the
// candidate is invalid (off-facet bounce, degenerate leg, occlusion).
bool build_path(const Scene& scene, const Vec3& a, const Vec3& b,
                const std::vector<int>& seq, Frequency f, PropagationPath& out)
{
    const int k = static_cast<int>(seq.size());
    std::vector<Vec3> images(k + 1);
    images[0] = a;
    for (int j = 1; j <= k; ++j)
        images[j] = mirror_point(images[j - 1], scene.facets[seq[j - 1]]);

    std::vector<Vec3> pts(k + 2);
    pts[0] = a;
    pts[k + 1] = b;
    for (int j = k; j >= 1; --j) {
        const Facet& fc = scene.facets[seq[j - 1]];
        const Vec3 from = pts[j + 1];
        const Vec3 d = images[j] - from;
        const double denom = d.dot(fc.unit_normal);
        if (std::abs(denom) < 1e-15)
            return false;
        const double t = (fc.vertices[0] - from).dot(fc.unit_normal) / denom;
        if (t <= 1e-12 || t >= 1.0 - 1e-12)
            return false;
        const Vec3 q = from + t * d;
        if (!point_in_facet(fc, q))
            return false;
        pts[j] = q;
    }

    out.points = pts;
    out.facet_ids = seq;
    out.segment_lengths_m.resize(k + 1);
    out.total_length_m = 0.0;
    for (int i = 0; i <= k; ++i) {
        const double len = (pts[i + 1] - pts[i]).norm();
        if (len < 1e-9)
            return false; // degenerate leg (e.g. bounce at an endpoint)
        out.segment_lengths_m[i] = len;
        out.total_length_m += len;
    }
    for (int i = 0; i <= k; ++i)
        if (!segment_clear(scene, pts[i], pts[i + 1]))
            return false;

    out.dir_from_a = (pts[1] - pts[0]).normalized();
    out.dir_into_b = (pts[k + 1] - pts[k]).normalized();

    out.bounce_coefficients.clear();
    out.gamma_power = 1.0;
    out.gamma_amplitude = {1.0, 0.0};
    for (int j = 0; j < k; ++j) {
        const Facet& fc = scene.facets[seq[j]];
        const Material& mat = scene.material_of(fc);
        const Vec3 d = (pts[j + 1] - pts[j]).normalized();
        const Vec3 n_eff = d.dot(fc.unit_normal) < 0.0 ? fc.unit_normal
                                                       : Vec3(-fc.unit_normal);
        const double cos_i = std::clamp(-d.dot(n_eff), 0.0, 1.0);
        const Angle inc = Angle::from_rad(std::acos(cos_i));
        const std::complex<double> g_te = fresnel_coefficient(mat, inc, f, Polarization::te);
        const std::complex<double> g_tm = fresnel_coefficient(mat, inc, f, Polarization::tm);
        const double ws = te_weight(d, n_eff);
        const std::complex<double> coef = ws * g_te + (1.0 - ws) * g_tm;
        out.bounce_coefficients.push_back(coef);
        out.gamma_power *= ws * std::norm(g_te) + (1.0 - ws) * std::norm(g_tm);
        out.gamma_amplitude *= coef;
    }
    return true;
}

void enumerate_sequences(const Scene& scene, const std::vector<int>& reflective, int order,
                         std::vector<int>& seq, const Vec3& a, const Vec3& b, Frequency f,
                         std::vector<PropagationPath>& out)
{
    if (static_cast<int>(seq.size()) == order) {
        PropagationPath path;
        if (build_path(scene, a, b, seq, f, path))
            out.push_back(std::move(path));
        return;
    }
    for (int id : reflective) {
        if (!seq.empty() && seq.back() == id)
            continue; // consecutive bounces on one facet are impossible
        seq.push_back(id);
        enumerate_sequences(scene, reflective, order, seq, a, b, f, out);
        seq.pop_back();
    }
}

} // namespace

std::vector<PropagationPath> reflect_paths(const Scene& scene, const Eigen::Vector3d& a,
                                           const Eigen::Vector3d& b, int max_order,
                                           Frequency f)
{
    if (max_order < 0 || max_order > 3)
        throw std::invalid_argument("reflect_paths: max_order must be in 0..3");
    if ((a - b).norm() < endpoint_tol_m)
        throw std::invalid_argument("reflect_paths: endpoints must be distinct");

    std::vector<PropagationPath> out;
    if (los_clear(scene, a, b)) {
        PropagationPath direct;
        direct.points = {a, b};
        direct.segment_lengths_m = {(b - a).norm()};
        direct.total_length_m = direct.segment_lengths_m[0];
        direct.dir_from_a = (b - a).normalized();
        direct.dir_into_b = direct.dir_from_a;
        out.push_back(std::move(direct));
    }

    std::vector<int> reflective;
    for (std::size_t i = 0; i < scene.facets.size(); ++i)
        if (!scene.material_of(scene.facets[i]).absorber)
            reflective.push_back(static_cast<int>(i));

    std::vector<int> seq;
    for (int order = 1; order <= max_order; ++order)
        enumerate_sequences(scene, reflective, order, seq, a, b, f, out);
    return out;
}

double AntennaNode::gain_dbi(const Eigen::Vector3d& dir) const
{
    if (isotropic)
        return 0.0;
    const double c = std::clamp(dir.normalized().dot(boresight.normalized()), -1.0, 1.0);
    const double off_deg = rad2deg(std::acos(c));
    const double g = peak_gain_dbi - 12.0 * (off_deg / hpbw_deg) * (off_deg / hpbw_deg);
    return std::max(g, peak_gain_dbi - sidelobe_down_db);
}

Eigen::Vector3d ARNode::to_pattern_frame(const Eigen::Vector3d& dir_scene) const
{
    const Vec3 u = gradient_axis;
    const Vec3 v = normal.cross(gradient_axis);
    return {dir_scene.dot(u), dir_scene.dot(v), dir_scene.dot(normal)};
}

double ARNode::rx_gain_dbi(const Eigen::Vector3d& dir_scene) const
{
    return pattern_gain_dbi(rx_pattern, to_pattern_frame(dir_scene));
}

double ARNode::tx_gain_dbi(const Eigen::Vector3d& dir_scene) const
{
    return pattern_gain_dbi(tx_pattern, to_pattern_frame(dir_scene));
}

ARNode make_ar_node(const Scene& scene, const PanelSpec& panel, const ElementModel& element,
                    Frequency f, const PatternGrid& grid)
{
    if (!scene.has_nodes)
        throw std::invalid_argument("make_ar_node: scene does not declare node geometry");
    ARNode ar;
    ar.position = scene.ar_position;
    ar.normal = scene.ar_normal.normalized();
    Vec3 u = scene.ar_gradient_axis;
    u -= u.dot(ar.normal) * ar.normal;
    const double un = u.norm();
    if (un < 1e-9)
        throw std::invalid_argument("make_ar_node: gradient axis parallel to the normal");
    ar.gradient_axis = u / un;

    const Angle design = panel.supercell.design_angle;
    const PhaseProfile hw = phase_profile(panel, Angle{0.0}, design,
                                          panel.supercell.design_frequency);
    ar.tx_pattern = with_directivity_scaling(
        synthesize_pattern(panel, element, hw, f, Angle{0.0}, grid));
    ar.rx_pattern = with_directivity_scaling(
        synthesize_pattern(panel, element, hw, f, Angle{-design.deg}, grid));
    return ar;
}

RadiatingNode as_node(const AntennaNode& antenna)
{
    return {antenna.position, [antenna](const Eigen::Vector3d& d) { return antenna.gain_dbi(d); }};
}

RadiatingNode ar_rx_node(const ARNode& ar)
{
    return {ar.position, [&ar](const Eigen::Vector3d& d) { return ar.rx_gain_dbi(d); }};
}

RadiatingNode ar_tx_node(const ARNode& ar)
{
    return {ar.position, [&ar](const Eigen::Vector3d& d) { return ar.tx_gain_dbi(d); }};
}

double hop_power_w(const RadiatingNode& tx, const RadiatingNode& rx,
                   const std::vector<PropagationPath>& paths, Frequency f,
                   double tx_power_w, Summation mode)
{
    if (paths.empty())
        return 0.0;
    const double lambda = wavelength_of(f);
    const double k = 2.0 * pi / lambda;

    if (mode == Summation::incoherent) {
        double acc = 0.0;
        for (const PropagationPath& p : paths) {
            const double g_tx = db_to_linear(tx.gain_dbi(p.dir_from_a));
            const double g_rx = db_to_linear(rx.gain_dbi(-p.dir_into_b));
            const double geo = lambda / (4.0 * pi * p.total_length_m);
            acc += tx_power_w * g_tx * g_rx * geo * geo * p.gamma_power;
        }
        return acc;
    }
    std::complex<double> field{0.0, 0.0};
    for (const PropagationPath& p : paths) {
        const double g_tx = db_to_linear(tx.gain_dbi(p.dir_from_a));
        const double g_rx = db_to_linear(rx.gain_dbi(-p.dir_into_b));
        const double geo = lambda / (4.0 * pi * p.total_length_m);
        field += std::sqrt(g_tx * g_rx) * geo * p.gamma_amplitude *
                 std::polar(1.0, -k * p.total_length_m);
    }
    return tx_power_w * std::norm(field);
}

PowerLevel simulate_ar_link(const Scene& scene, const AntennaNode& tx, const ARNode& ar,
                            const AntennaNode& rx, Frequency f, int max_order,
                            const LinkParams& chain, Summation mode)
{
    if (std::abs(ar.rx_pattern.frequency.hz - f.hz) > 1.0 ||
        std::abs(ar.tx_pattern.frequency.hz - f.hz) > 1.0)
        throw std::invalid_argument("simulate_ar_link: AR patterns not synthesized at f");

    const auto paths_in = reflect_paths(scene, tx.position, ar.position, max_order, f);
    const auto paths_out = reflect_paths(scene, ar.position, rx.position, max_order, f);
    const double lambda = wavelength_of(f);
    const double k = 2.0 * pi / lambda;
    const double p_t_w = chain.p_t.watts();

    double total_w = 0.0;
    std::complex<double> field{0.0, 0.0};
    for (const PropagationPath& p1 : paths_in) {
        const double g_t = db_to_linear(tx.gain_dbi(p1.dir_from_a));
        const double g_ar_rx = db_to_linear(ar.rx_gain_dbi(-p1.dir_into_b));
        const double geo1 = lambda / (4.0 * pi * p1.total_length_m);
        for (const PropagationPath& p2 : paths_out) {
            const double g_ar_tx = db_to_linear(ar.tx_gain_dbi(p2.dir_from_a));
            const double g_r = db_to_linear(rx.gain_dbi(-p2.dir_into_b));
            const double geo2 = lambda / (4.0 * pi * p2.total_length_m);
            if (mode == Summation::incoherent) {
                total_w += p_t_w * g_t * g_ar_rx * g_ar_tx * g_r * geo1 * geo1 * geo2 *
                           geo2 * p1.gamma_power * p2.gamma_power;
            } else {
                field += std::sqrt(g_t * g_ar_rx * g_ar_tx * g_r) * geo1 * geo2 *
                         p1.gamma_amplitude * p2.gamma_amplitude *
                         std::polar(1.0, -k * (p1.total_length_m + p2.total_length_m));
            }
        }
    }
    if (mode == Summation::coherent)
        total_w = p_t_w * std::norm(field);
    return chain_terminal(PowerLevel::from_watts(total_w), chain);
}

} // namespace ars
