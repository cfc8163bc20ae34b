// SPDX-License-Identifier: Apache-2.0

#include "ars/io.hpp"

#include <cerrno>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace ars {

namespace {

std::string fmt(const char* f, ...)
{
    char buf[256];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_number(const std::string& tok, const std::string& where)
{
    if (tok.empty())
        throw data_error(where + ": empty numeric field");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
        throw data_error(where + ": malformed number '" + tok + "'");
    if (!std::isfinite(v))
        throw data_error(where + ": non-finite number '" + tok + "'");
    return v;
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw data_error("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw data_error("write failed for '" + path + "'");
}

// Splits into lines; keeps line numbers 1-based, drops blank lines and
// '#' comments, checks the expected header.
struct TableReader {
    std::string path;
    std::vector<std::pair<int, std::string>> rows;

    TableReader(const std::string& p, const std::string& expected_header) : path(p)
    {
        std::istringstream in(read_text(p));
        std::string line;
        int lineno = 0;
        bool header_seen = false;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#')
                continue;
            if (!header_seen) {
                if (t != expected_header)
                    throw data_error(p + ":" + std::to_string(lineno) +
                                     ": expected header '" + expected_header + "'");
                header_seen = true;
                continue;
            }
            rows.emplace_back(lineno, t);
        }
        if (!header_seen)
            throw data_error(p + ": missing header line");
    }
};

} // namespace

std::string to_string(Waveform w)
{
    switch (w) {
    case Waveform::modulated_16qam_400mhz:
        return "modulated-16qam-400mhz";
    case Waveform::modulated_64qam_100mhz:
        return "modulated-64qam-100mhz";
    case Waveform::continuous_wave:
        return "continuous-wave";
    }
    return "continuous-wave";
}

Waveform waveform_from_string(const std::string& s)
{
    if (s == "modulated-16qam-400mhz")
        return Waveform::modulated_16qam_400mhz;
    if (s == "modulated-64qam-100mhz")
        return Waveform::modulated_64qam_100mhz;
    if (s == "continuous-wave")
        return Waveform::continuous_wave;
    throw data_error("unknown waveform tag '" + s + "'");
}

std::vector<MeasurementRecord> parse_measurements(const std::string& path)
{
    const TableReader table(path, "freq_ghz, angle_deg, waveform, p_m_dbm, evm_percent");
    std::vector<MeasurementRecord> out;
    std::set<std::tuple<long long, long long, int>> seen;
    for (const auto& [lineno, row] : table.rows) {
        const std::string where = path + ":" + std::to_string(lineno);
        const auto cols = split_csv(row);
        if (cols.size() != 5)
            throw data_error(where + ": expected 5 columns, got " +
                             std::to_string(cols.size()));
        MeasurementRecord r;
        r.freq_ghz = parse_number(cols[0], where);
        r.angle_deg = parse_number(cols[1], where);
        try {
            r.waveform = waveform_from_string(cols[2]);
        } catch (const data_error& e) {
            throw data_error(where + ": " + e.what());
        }
        r.p_m_dbm = parse_number(cols[3], where);
        if (!cols[4].empty()) {
            const double evm = parse_number(cols[4], where);
            if (!(evm > 0.0) || evm > 100.0)
                throw data_error(where + ": EVM must be in (0, 100]");
            r.evm_percent = evm;
        }
        const auto key = std::make_tuple(std::llround(r.freq_ghz * 1e6),
                                         std::llround(r.angle_deg * 1e6),
                                         static_cast<int>(r.waveform));
        if (!seen.insert(key).second)
            throw data_error(where + ": duplicate (frequency, angle, waveform) key");
        out.push_back(r);
    }
    return out;
}

void write_measurements(const std::vector<MeasurementRecord>& records,
                        const std::string& path)
{
    std::string text = "freq_ghz, angle_deg, waveform, p_m_dbm, evm_percent\n";
    for (const auto& r : records) {
        text += fmt("%.2f, %.1f, %s, %.4f,", r.freq_ghz, r.angle_deg,
                    to_string(r.waveform).c_str(), r.p_m_dbm);
        if (r.evm_percent)
            text += fmt(" %.2f", *r.evm_percent);
        text += "\n";
    }
    write_text(path, text);
}

CorrectionTable read_correction_table(const std::string& path)
{
    const TableReader table(path, "freq_ghz, angle_deg, p_diff_db");
    CorrectionTable out;
    for (const auto& [lineno, row] : table.rows) {
        const std::string where = path + ":" + std::to_string(lineno);
        const auto cols = split_csv(row);
        if (cols.size() != 3)
            throw data_error(where + ": expected 3 columns");
        try {
            out.insert(parse_number(cols[0], where), parse_number(cols[1], where),
                       parse_number(cols[2], where));
        } catch (const std::invalid_argument& e) {
            throw data_error(where + ": " + e.what());
        }
    }
    return out;
}

void write_correction_table(const CorrectionTable& table, std::ostream& os)
{
    os << "freq_ghz, angle_deg, p_diff_db\n";
    for (const auto& e : table.entries())
        os << fmt("%.2f, %.1f, %.2f\n", e.freq_ghz, e.angle_deg, e.p_diff_db);
}

void write_correction_table(const CorrectionTable& table, const std::string& path)
{
    std::ostringstream ss;
    write_correction_table(table, ss);
    write_text(path, ss.str());
}

LinkParams read_link_params(const std::string& path)
{
    const TableReader table(path, "p_t_dbm, g_t_db, g_r_db, l_t_db, g_a_db, r1_m, r2_m");
    if (table.rows.size() != 1)
        throw data_error(path + ": expected exactly one data row");
    const auto& [lineno, row] = table.rows.front();
    const std::string where = path + ":" + std::to_string(lineno);
    const auto cols = split_csv(row);
    if (cols.size() != 7)
        throw data_error(where + ": expected 7 columns");
    LinkParams p;
    p.p_t = PowerLevel{parse_number(cols[0], where)};
    p.g_t = GainDb{parse_number(cols[1], where)};
    p.g_r = GainDb{parse_number(cols[2], where)};
    p.l_t = GainDb{parse_number(cols[3], where)};
    p.g_a = GainDb{parse_number(cols[4], where)};
    p.r1_m = parse_number(cols[5], where);
    p.r2_m = parse_number(cols[6], where);
    if (!(p.r1_m > 0.0) || !(p.r2_m > 0.0))
        throw data_error(where + ": hop distances must be positive");
    return p;
}

namespace {

const char* normalization_tag(Normalization n)
{
    switch (n) {
    case Normalization::raw:
        return "raw";
    case Normalization::peak:
        return "peak";
    case Normalization::directivity:
        return "directivity";
    }
    return "raw";
}

Normalization normalization_from_tag(const std::string& s, const std::string& where)
{
    if (s == "raw")
        return Normalization::raw;
    if (s == "peak")
        return Normalization::peak;
    if (s == "directivity")
        return Normalization::directivity;
    throw data_error(where + ": unknown normalization tag '" + s + "'");
}

} // namespace

void write_link_params(const LinkParams& p, const std::string& path)
{
    std::string text = "p_t_dbm, g_t_db, g_r_db, l_t_db, g_a_db, r1_m, r2_m\n";
    text += fmt("%.4f, %.4f, %.4f, %.4f, %.4f, %.4f, %.4f\n", p.p_t.dbm, p.g_t.db,
                p.g_r.db, p.l_t.db, p.g_a.db, p.r1_m, p.r2_m);
    write_text(path, text);
}

RadiationPattern read_pattern(const std::string& path)
{
    std::istringstream in(read_text(path));
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    double freq_ghz = 0.0;
    Normalization norm = Normalization::directivity; // external files carry gains

    std::vector<double> thetas, phis;
    std::vector<Complex> amplitudes;
    std::map<long long, Eigen::Index> theta_index, phi_index;

    std::vector<std::tuple<double, double, Complex>> samples;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t[0] == '#') {
            const auto eq = t.find('=');
            if (t.find("frequency_ghz") != std::string::npos && eq != std::string::npos)
                freq_ghz = parse_number(trim(t.substr(eq + 1)),
                                        path + ":" + std::to_string(lineno));
            else if (t.find("normalization") != std::string::npos && eq != std::string::npos)
                norm = normalization_from_tag(trim(t.substr(eq + 1)),
                                              path + ":" + std::to_string(lineno));
            continue;
        }
        if (!header_seen) {
            if (t != "theta_deg, phi_deg, gain_dbi, phase_deg")
                throw data_error(path + ":" + std::to_string(lineno) +
                                 ": expected pattern header");
            header_seen = true;
            continue;
        }
        const std::string where = path + ":" + std::to_string(lineno);
        const auto cols = split_csv(t);
        if (cols.size() != 4)
            throw data_error(where + ": expected 4 columns");
        const double theta = parse_number(cols[0], where);
        const double phi = parse_number(cols[1], where);
        const double gain_dbi = parse_number(cols[2], where);
        const double phase_deg = parse_number(cols[3], where);
        const double amp = gain_dbi <= -399.0 ? 0.0 : std::pow(10.0, gain_dbi / 20.0);
        samples.emplace_back(theta, phi, std::polar(amp, deg2rad(phase_deg)));

        const long long tk = std::llround(theta * 1e6);
        const long long pk = std::llround(phi * 1e6);
        if (!theta_index.count(tk)) {
            theta_index[tk] = 0;
            thetas.push_back(theta);
        }
        if (!phi_index.count(pk)) {
            phi_index[pk] = 0;
            phis.push_back(phi);
        }
    }
    if (!header_seen)
        throw data_error(path + ": missing header line");
    if (samples.empty())
        throw data_error(path + ": pattern has no samples");

    std::sort(thetas.begin(), thetas.end());
    std::sort(phis.begin(), phis.end());
    for (std::size_t i = 0; i < thetas.size(); ++i)
        theta_index[std::llround(thetas[i] * 1e6)] = static_cast<Eigen::Index>(i);
    for (std::size_t i = 0; i < phis.size(); ++i)
        phi_index[std::llround(phis[i] * 1e6)] = static_cast<Eigen::Index>(i);

    if (samples.size() != thetas.size() * phis.size())
        throw data_error(path + ": pattern grid is not complete (theta x phi)");

    RadiationPattern pat;
    pat.frequency = Frequency::from_ghz(freq_ghz);
    pat.theta_deg = Eigen::Map<const Eigen::ArrayXd>(thetas.data(), thetas.size());
    pat.phi_deg = Eigen::Map<const Eigen::ArrayXd>(phis.data(), phis.size());
    pat.values.setZero(pat.theta_deg.size(), pat.phi_deg.size());
    pat.norm = norm;
    for (const auto& [theta, phi, value] : samples)
        pat.values(theta_index[std::llround(theta * 1e6)],
                   phi_index[std::llround(phi * 1e6)]) = value;
    return pat;
}

void write_pattern(const RadiationPattern& pat, const std::string& path)
{
    std::string text = fmt("# frequency_ghz = %.6f\n", pat.frequency.ghz());
    text += std::string("# normalization = ") + normalization_tag(pat.norm) + "\n";
    text += "theta_deg, phi_deg, gain_dbi, phase_deg\n";
    for (Eigen::Index it = 0; it < pat.theta_deg.size(); ++it) {
        for (Eigen::Index ip = 0; ip < pat.phi_deg.size(); ++ip) {
            const Complex v = pat.values(it, ip);
            const double power = std::norm(v);
            const double gain_dbi = power > 0.0 ? 10.0 * std::log10(power) : -400.0;
            text += fmt("%.4f, %.4f, %.6f, %.6f\n", pat.theta_deg[it], pat.phi_deg[ip],
                        gain_dbi, rad2deg(std::arg(v)));
        }
    }
    write_text(path, text);
}

namespace {

std::vector<double> parse_number_list(const std::string& value, const std::string& where)
{
    std::vector<double> out;
    for (const std::string& tok : split_csv(value))
        out.push_back(parse_number(tok, where));
    return out;
}

std::string join_numbers(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ", ";
        // shortest clean representation (keeps 62.5 readable)
        std::string n = fmt("%g", v[i]);
        out += n;
    }
    return out;
}

std::string resolve_against(const std::string& base_dir, const std::string& p)
{
    if (p.empty())
        return p;
    fs::path fp(p);
    if (fp.is_absolute())
        return p;
    return (fs::path(base_dir) / fp).lexically_normal().string();
}

} // namespace

RunConfig parse_config(const std::string& path)
{
    std::string text;
    try {
        text = read_text(path);
    } catch (const data_error& e) {
        throw config_error(e.what());
    }
    std::istringstream in(text);
    const std::string base_dir = fs::path(path).parent_path().string();
    RunConfig cfg;
    cfg.angles_deg.clear();
    cfg.frequencies_ghz.clear();

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const std::string where = path + ":" + std::to_string(lineno);
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error(where + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));

        if (key == "panel") {
            const double v = parse_number(value, where);
            if (v != 48.0 && v != 96.0)
                throw config_error(where + ": panel must be 48 or 96");
            cfg.panel = static_cast<int>(v);
        } else if (key == "angles") {
            cfg.angles_deg = parse_number_list(value, where);
        } else if (key == "frequencies") {
            cfg.frequencies_ghz = parse_number_list(value, where);
        } else if (key == "max_order") {
            const double v = parse_number(value, where);
            if (v < 0.0 || v > 3.0 || v != std::floor(v))
                throw config_error(where + ": max_order must be an integer in 0..3");
            cfg.max_order = static_cast<int>(v);
        } else if (key == "summation") {
            if (value == "incoherent")
                cfg.summation = Summation::incoherent;
            else if (value == "coherent")
                cfg.summation = Summation::coherent;
            else
                throw config_error(where + ": summation must be incoherent or coherent");
        } else if (key == "element") {
            // analytic model name, or a pattern file resolved like other paths
            cfg.element = (value == "huygens" || value == "cosine" || value == "isotropic")
                              ? value
                              : resolve_against(base_dir, value);
        } else if (key == "scene") {
            cfg.scene_path = resolve_against(base_dir, value);
        } else if (key == "corrections") {
            cfg.corrections_path = resolve_against(base_dir, value);
        } else if (key == "measurements") {
            cfg.measurements_path = resolve_against(base_dir, value);
        } else if (key == "link") {
            cfg.link_path = resolve_against(base_dir, value);
        } else if (key == "bandwidth_mhz") {
            cfg.bandwidth_mhz = parse_number(value, where);
            if (!(cfg.bandwidth_mhz > 0.0))
                throw config_error(where + ": bandwidth must be positive");
        } else if (key == "noise_figure_db") {
            cfg.noise_figure_db = parse_number(value, where);
        } else {
            throw config_error(where + ": unknown key '" + key + "'");
        }
    }
    if (cfg.angles_deg.empty())
        throw config_error(path + ": angle list must not be empty");
    if (cfg.frequencies_ghz.empty())
        throw config_error(path + ": frequency list must not be empty");
    return cfg;
}

void write_config(const RunConfig& cfg, const std::string& path)
{
    std::string text;
    text += fmt("panel = %d\n", cfg.panel);
    text += "angles = " + join_numbers(cfg.angles_deg) + "\n";
    text += "frequencies = " + join_numbers(cfg.frequencies_ghz) + "\n";
    text += fmt("max_order = %d\n", cfg.max_order);
    text += std::string("summation = ") +
            (cfg.summation == Summation::incoherent ? "incoherent" : "coherent") + "\n";
    text += "element = " + cfg.element + "\n";
    if (!cfg.scene_path.empty())
        text += "scene = " + cfg.scene_path + "\n";
    if (!cfg.corrections_path.empty())
        text += "corrections = " + cfg.corrections_path + "\n";
    if (!cfg.measurements_path.empty())
        text += "measurements = " + cfg.measurements_path + "\n";
    if (!cfg.link_path.empty())
        text += "link = " + cfg.link_path + "\n";
    text += fmt("bandwidth_mhz = %g\n", cfg.bandwidth_mhz);
    text += fmt("noise_figure_db = %g\n", cfg.noise_figure_db);
    write_text(path, text);
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path)
{
    std::string text = "freq_ghz, angle_deg, method, p_dbm\n";
    for (const auto& r : rows)
        text += fmt("%.2f, %.1f, %s, %.4f\n", r.freq_ghz, r.angle_deg, r.method.c_str(),
                    r.p_dbm);
    write_text(path, text);
}

std::vector<ResultRow> read_results_csv(const std::string& path)
{
    const TableReader table(path, "freq_ghz, angle_deg, method, p_dbm");
    std::vector<ResultRow> out;
    for (const auto& [lineno, row] : table.rows) {
        const std::string where = path + ":" + std::to_string(lineno);
        const auto cols = split_csv(row);
        if (cols.size() != 4)
            throw data_error(where + ": expected 4 columns");
        ResultRow r;
        r.freq_ghz = parse_number(cols[0], where);
        r.angle_deg = parse_number(cols[1], where);
        r.method = cols[2];
        r.p_dbm = parse_number(cols[3], where);
        out.push_back(r);
    }
    return out;
}

Scene load_scene(const std::string& path)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path + ": " + e.what());
    }

    Scene s;
    try {
        std::map<std::string, int> by_name;
        for (const auto& jm : j.at("materials")) {
            Material m;
            m.name = jm.at("name").get<std::string>();
            m.eps_r = jm.at("eps_r").get<double>();
            m.sigma_c = jm.at("sigma_c").get<double>();
            m.sigma_d = jm.at("sigma_d").get<double>();
            m.absorber = jm.value("absorber", false);
            if (m.eps_r < 1.0 || m.sigma_c < 0.0)
                throw data_error(path + ": material '" + m.name +
                                 "': eps_r must be >= 1 and sigma >= 0");
            if (by_name.count(m.name))
                throw data_error(path + ": duplicate material '" + m.name + "'");
            by_name[m.name] = static_cast<int>(s.materials.size());
            s.materials.push_back(m);
        }

        int index = 0;
        for (const auto& jf : j.at("facets")) {
            const std::string mat = jf.at("material").get<std::string>();
            if (!by_name.count(mat))
                throw data_error(path + ": facet " + std::to_string(index) +
                                 ": unknown material '" + mat + "'");
            std::vector<Eigen::Vector3d> verts;
            for (const auto& jv : jf.at("vertices")) {
                if (jv.size() != 3)
                    throw data_error(path + ": facet " + std::to_string(index) +
                                     ": vertices must be [x, y, z]");
                verts.emplace_back(jv[0].get<double>(), jv[1].get<double>(),
                                   jv[2].get<double>());
            }
            try {
                s.facets.push_back(make_facet(std::move(verts), by_name[mat]));
            } catch (const std::invalid_argument& e) {
                throw data_error(path + ": facet " + std::to_string(index) + ": " +
                                 e.what());
            }
            ++index;
        }

        if (j.contains("nodes")) {
            const auto& jn = j.at("nodes");
            auto vec3 = [&](const nlohmann::json& v) {
                return Eigen::Vector3d(v[0].get<double>(), v[1].get<double>(),
                                       v[2].get<double>());
            };
            s.ar_position = vec3(jn.at("ar").at("position"));
            s.ar_normal = vec3(jn.at("ar").at("normal")).normalized();
            s.ar_gradient_axis = vec3(jn.at("ar").at("gradient_axis"));
            s.tx_position = vec3(jn.at("tx").at("position"));
            s.rx_arc_radius_m = jn.at("rx_arc").at("radius").get<double>();
            s.has_nodes = true;
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path + ": " + e.what());
    }
    return s;
}

} // namespace ars
