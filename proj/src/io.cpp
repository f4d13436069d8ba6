#include "signspec/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <boost/uuid/detail/sha1.hpp>
#include <nlohmann/json.hpp>

namespace signspec {

using nlohmann::json;

void RunConfig::validate() const {
    if (a <= 0 || b <= 0) throw std::invalid_argument("semi-axes must be positive");
    if (deltas.empty()) throw std::invalid_argument("config needs at least one delta");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i] <= 0 || deltas[i] * std::max(a, b) >= 1)
            throw std::invalid_argument("inclusion must fit strictly inside the unit disk");
        if (i && deltas[i] >= deltas[i - 1])
            throw std::invalid_argument("delta list must be strictly decreasing");
    }
    if (!(sigma_plus > 0)) throw std::invalid_argument("sigma_plus must be positive");
    if (!(sigma_minus < 0)) throw std::invalid_argument("sigma_minus must be negative");
    if (sigma_minus / sigma_plus == -1.0)
        throw std::invalid_argument("excluded contrast kappa = -1");
    if (k_pos < 0 || k_neg < 0 || k_pos + k_neg == 0)
        throw std::invalid_argument("needs a positive number of eigenvalues");
    if (tol <= 0) throw std::invalid_argument("tol must be positive");
    if (refinements < 0 || krylov_dim < 0) throw std::invalid_argument("negative size parameter");
    mesh.validate();
}

std::string RunConfig::to_json() const {
    json j;
    j["geometry"] = {{"a", a}, {"b", b}, {"deltas", deltas}};
    j["materials"] = {{"sigma_plus", sigma_plus}, {"sigma_minus", sigma_minus}};
    j["mesh"] = {{"inclusion_rings", mesh.inclusion_rings},
                 {"annulus_rings", mesh.annulus_rings},
                 {"grading_exponent", mesh.grading_exponent},
                 {"angular_segments", mesh.angular_segments},
                 {"refinements", refinements}};
    j["eigen"] = {{"k_pos", k_pos},
                  {"k_neg", k_neg},
                  {"tol", tol},
                  {"krylov_dim", krylov_dim},
                  {"seed", seed}};
    j["outputs"] = {{"directory", output_dir}, {"formats", formats}};
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    RunConfig c;
    try {
        const auto& g = j.at("geometry");
        c.a = g.at("a").get<double>();
        c.b = g.at("b").get<double>();
        if (g.contains("deltas")) c.deltas = g.at("deltas").get<std::vector<double>>();
        else c.deltas = {g.at("delta").get<double>()};
        const auto& m = j.at("materials");
        c.sigma_plus = m.at("sigma_plus").get<double>();
        c.sigma_minus = m.at("sigma_minus").get<double>();
        if (j.contains("mesh")) {
            const auto& me = j["mesh"];
            c.mesh.inclusion_rings = me.value("inclusion_rings", c.mesh.inclusion_rings);
            c.mesh.annulus_rings = me.value("annulus_rings", c.mesh.annulus_rings);
            c.mesh.grading_exponent = me.value("grading_exponent", c.mesh.grading_exponent);
            c.mesh.angular_segments = me.value("angular_segments", c.mesh.angular_segments);
            c.refinements = me.value("refinements", c.refinements);
        }
        if (j.contains("eigen")) {
            const auto& e = j["eigen"];
            c.k_pos = e.value("k_pos", c.k_pos);
            c.k_neg = e.value("k_neg", c.k_neg);
            c.tol = e.value("tol", c.tol);
            c.krylov_dim = e.value("krylov_dim", c.krylov_dim);
            c.seed = e.value("seed", c.seed);
        }
        if (j.contains("outputs")) {
            const auto& o = j["outputs"];
            c.output_dir = o.value("directory", c.output_dir);
            c.formats = o.value("formats", c.formats);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config field error: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return from_json(text);
}

void RunConfig::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write config " + path);
    os << to_json();
}

std::string format_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

void write_vtk_field(const Mesh& mesh, const Eigen::Ref<const Eigen::VectorXd>& nodal,
                     const std::string& field_name, const std::string& path) {
    if (nodal.size() != Eigen::Index(mesh.nodes.size()))
        throw std::invalid_argument("vtk field size must match node count");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);

    auto g9 = [](double v) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };

    os << "# vtk DataFile Version 3.0\n";
    os << "eigenfield\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.nodes.size() << " double\n";
    for (const auto& p : mesh.nodes) os << g9(p.x()) << " " << g9(p.y()) << " 0\n";
    os << "CELLS " << mesh.triangles.size() << " " << 4 * mesh.triangles.size() << "\n";
    for (const auto& t : mesh.triangles) os << "3 " << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
    os << "CELL_TYPES " << mesh.triangles.size() << "\n";
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) os << "5\n";
    os << "POINT_DATA " << mesh.nodes.size() << "\n";
    os << "SCALARS " << field_name << " double 1\n";
    os << "LOOKUP_TABLE default\n";
    for (Eigen::Index i = 0; i < nodal.size(); ++i) os << g9(nodal[i]) << "\n";
    os << "CELL_DATA " << mesh.triangles.size() << "\n";
    os << "SCALARS region int 1\n";
    os << "LOOKUP_TABLE default\n";
    for (const auto& t : mesh.triangles) os << (t.region == Region::Minus ? 1 : 0) << "\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

void write_loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                      const std::string& path) {
    if (series.empty()) throw std::invalid_argument("no series to plot");
    double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
    bool first = true;
    for (const auto& s : series) {
        if (s.points.empty()) throw std::invalid_argument("empty series: " + s.label);
        for (auto [x, y] : s.points) {
            if (x <= 0 || y <= 0)
                throw std::invalid_argument("log-log plot needs positive data: " + s.label);
            if (first) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first = false;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    if (x_hi == x_lo) x_hi = x_lo * 1.1;
    if (y_hi == y_lo) y_hi = y_lo * 1.1;

    const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    auto px = [&](double x) {
        return ml + (std::log(x) - std::log(x_lo)) / (std::log(x_hi) - std::log(x_lo)) *
                        (W - ml - mr);
    };
    auto py = [&](double y) {
        return H - mb - (std::log(y) - std::log(y_lo)) / (std::log(y_hi) - std::log(y_lo)) *
                            (H - mt - mb);
    };
    const char* colors[] = {"#1f6fb4", "#d1442e", "#2e8540", "#7d3fa8", "#b8860b", "#444444"};

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    auto g = [](double v) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
    // Axes box and decade ticks.
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
       << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int e = int(std::ceil(std::log10(x_lo))); std::pow(10.0, e) <= x_hi * 1.0001; ++e) {
        const double x = std::pow(10.0, e);
        if (x < x_lo) continue;
        os << "<line x1=\"" << g(px(x)) << "\" y1=\"" << mt << "\" x2=\"" << g(px(x)) << "\" y2=\""
           << H - mb << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << g(px(x)) << "\" y=\"" << H - mb + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">1e" << e << "</text>\n";
    }
    for (int e = int(std::ceil(std::log10(y_lo))); std::pow(10.0, e) <= y_hi * 1.0001; ++e) {
        const double y = std::pow(10.0, e);
        if (y < y_lo) continue;
        os << "<line x1=\"" << ml << "\" y1=\"" << g(py(y)) << "\" x2=\"" << W - mr << "\" y2=\""
           << g(py(y)) << "\" stroke=\"#dddddd\"/>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << g(py(y) + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";
    }

    int ci = 0;
    double legend_y = mt + 16;
    for (const auto& s : series) {
        const char* color = colors[ci++ % 6];
        std::vector<std::pair<double, double>> pts = s.points;
        std::sort(pts.begin(), pts.end());
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : pts) os << g(px(x)) << "," << g(py(y)) << " ";
        os << "\"/>\n";
        for (auto [x, y] : pts)
            os << "<circle cx=\"" << g(px(x)) << "\" cy=\"" << g(py(y)) << "\" r=\"3\" fill=\""
               << color << "\"/>\n";
        std::string label = s.label;
        if (s.annotate_slope && pts.size() >= 3) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (auto [x, y] : pts) {
                const double lx = std::log(x), ly = std::log(y);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            const double n = double(pts.size());
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            char buf[32];
            std::snprintf(buf, sizeof(buf), " (slope %.2f)", slope);
            label += buf;
        }
        os << "<text x=\"" << ml + 10 << "\" y=\"" << legend_y << "\" font-size=\"12\" fill=\""
           << color << "\">" << label << "</text>\n";
        legend_y += 16;
    }
    os << "</svg>\n";
    if (!os) throw std::runtime_error("write failed: " + path);
}

std::string content_hash(const std::string& bytes) {
    boost::uuids::detail::sha1 sha;
    const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
    sha.process_bytes(header.data(), header.size());
    sha.process_bytes(bytes.data(), bytes.size());
    unsigned int digest[5];
    sha.get_digest(digest);
    char out[41];
    for (int i = 0; i < 5; ++i) std::snprintf(out + 8 * i, 9, "%08x", digest[i]);
    return std::string(out, 40);
}

void write_run_manifest(const std::string& dir, const std::string& config_json,
                        const std::vector<std::string>& files) {
    json j;
    j["config_hash"] = content_hash(config_json);
    j["config"] = json::parse(config_json);
    j["files"] = files;
    std::ofstream os(dir + "/manifest.json");
    if (!os) throw std::runtime_error("cannot write manifest in " + dir);
    os << j.dump(2) << "\n";
}

}  // namespace signspec
