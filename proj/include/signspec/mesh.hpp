#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace signspec {

// Elliptical inclusion delta*{(x/a)^2 + (y/b)^2 < 1} centered in the unit disk.
struct InclusionGeometry {
    double a = 0.5;
    double b = 0.25;
    double delta = 0.5;

    void validate() const;
    double interface_a() const { return delta * a; }
    double interface_b() const { return delta * b; }
};

// Structured mesh controls. The inclusion triangle count depends only on
// inclusion_rings and angular_segments, never on delta.
struct MeshParams {
    int inclusion_rings = 2;
    int annulus_rings = 8;
    double grading_exponent = 1.0;  // geometric ring-spacing ratio, >= 1
    int angular_segments = 16;      // even, >= 8

    void validate() const;
};

enum class Region : std::uint8_t { Plus = 0, Minus = 1 };
enum class NodeMarker : std::uint8_t { Interior = 0, Boundary = 1, Interface = 2 };

struct Triangle {
    int v[3];
    Region region;
};

struct Mesh {
    std::vector<Eigen::Vector2d> nodes;
    std::vector<Triangle> triangles;
    std::vector<NodeMarker> markers;  // one per node

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    std::vector<int> boundary_nodes() const;
    std::vector<int> interface_nodes() const;

    double signed_area(int t) const;
    Eigen::Vector2d centroid(int t) const;
};

struct QualityReport {
    double h_max = 0;
    double h_min = 0;
    double min_angle_deg = 0;
    int plus_triangles = 0;
    int minus_triangles = 0;
};

Mesh build_disk_ellipse_mesh(const InclusionGeometry& geom, const MeshParams& params);
Mesh uniform_refine(const Mesh& mesh, const InclusionGeometry& geom);
QualityReport mesh_quality(const Mesh& mesh);

// Conformity / region-purity / orientation checks; throws std::runtime_error
// with a description of the first violated invariant.
void check_mesh_invariants(const Mesh& mesh, const InclusionGeometry& geom);

// Nearest point on the ellipse (x/A)^2 + (y/B)^2 = 1.
Eigen::Vector2d project_to_ellipse(double A, double B, const Eigen::Vector2d& p);

// Plain ASCII mesh exchange format:
//   nodes N triangles T
//   x y marker          (N lines, marker in {interior, boundary, interface})
//   i j k region        (T lines, 0-based, region in {plus, minus})
void write_mesh_ascii(const Mesh& mesh, std::ostream& os);
Mesh read_mesh_ascii(std::istream& is);
void write_mesh_ascii_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_ascii_file(const std::string& path);

}  // namespace signspec
