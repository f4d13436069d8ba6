#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "signspec/mesh.hpp"

namespace signspec {

struct RunConfig {
    double a = 0.5, b = 0.25;
    std::vector<double> deltas = {0.5};  // single entry for point solves
    double sigma_plus = 1.0, sigma_minus = -2.5;
    MeshParams mesh;
    int refinements = 1;
    int k_pos = 6, k_neg = 3;
    double tol = 1e-8;
    int krylov_dim = 0;  // 0: automatic
    std::uint64_t seed = 0x5157ab1eu;
    std::string output_dir = "out";
    std::vector<std::string> formats = {"csv"};

    void validate() const;  // structural checks; contrast admissibility is reported separately
    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
};

// Shortest decimal representation that round-trips to the same double.
std::string format_shortest(double v);

// One CSV line from cells, comma-joined, with trailing newline.
std::string csv_line(const std::vector<std::string>& cells);

// Legacy ASCII VTK unstructured grid: triangle cells, one nodal scalar field,
// plus an integer cell field with the region tag. Deterministic bytes.
void write_vtk_field(const Mesh& mesh, const Eigen::Ref<const Eigen::VectorXd>& nodal,
                     const std::string& field_name, const std::string& path);

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // positive coordinates
    bool annotate_slope = false;                    // log-log fit printed on the plot
};

void write_loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                      const std::string& path);

// Git-style (blob sha1) content hash, hex.
std::string content_hash(const std::string& bytes);

// manifest.json in `dir`: config hash, config echo, emitted file list.
void write_run_manifest(const std::string& dir, const std::string& config_json,
                        const std::vector<std::string>& files);

}  // namespace signspec
