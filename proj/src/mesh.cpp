#include "signspec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace signspec {

namespace {

constexpr double kCurveTol = 1e-12;  // relative node-on-curve tolerance

double two_pi() { return 2.0 * M_PI; }

}  // namespace

void InclusionGeometry::validate() const {
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("inclusion semi-axes must be positive");
    if (!(delta > 0) || !(delta <= 1)) throw std::invalid_argument("delta must lie in (0,1]");
    if (delta * std::max(a, b) >= 1.0)
        throw std::invalid_argument("inclusion touches or crosses the unit circle");
}

void MeshParams::validate() const {
    if (inclusion_rings < 1) throw std::invalid_argument("inclusion_rings must be >= 1");
    if (annulus_rings < 2) throw std::invalid_argument("annulus_rings must be >= 2");
    if (!(grading_exponent >= 1.0)) throw std::invalid_argument("grading_exponent must be >= 1");
    if (angular_segments < 8 || angular_segments % 2 != 0)
        throw std::invalid_argument("angular_segments must be even and >= 8");
}

std::vector<int> Mesh::boundary_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < node_count(); ++i)
        if (markers[i] == NodeMarker::Boundary) out.push_back(i);
    return out;
}

std::vector<int> Mesh::interface_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < node_count(); ++i)
        if (markers[i] == NodeMarker::Interface) out.push_back(i);
    return out;
}

double Mesh::signed_area(int t) const {
    const auto& tr = triangles[t];
    const Eigen::Vector2d& p0 = nodes[tr.v[0]];
    const Eigen::Vector2d& p1 = nodes[tr.v[1]];
    const Eigen::Vector2d& p2 = nodes[tr.v[2]];
    return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

Eigen::Vector2d Mesh::centroid(int t) const {
    const auto& tr = triangles[t];
    return (nodes[tr.v[0]] + nodes[tr.v[1]] + nodes[tr.v[2]]) / 3.0;
}

Eigen::Vector2d project_to_ellipse(double A, double B, const Eigen::Vector2d& p) {
    // Newton on g(th) = d/dth |p - (A cos th, B sin th)|^2 / 2.
    double th = std::atan2(p.y() / B, p.x() / A);
    for (int it = 0; it < 50; ++it) {
        const double c = std::cos(th), s = std::sin(th);
        const double ex = A * c - p.x(), ey = B * s - p.y();
        const double g = -ex * A * s + ey * B * c;
        const double dg = ex * (-A * c) + A * s * A * s + ey * (-B * s) + B * c * B * c;
        const double step = g / dg;
        th -= step;
        if (std::abs(step) < 1e-16) break;
    }
    return {A * std::cos(th), B * std::sin(th)};
}

Mesh build_disk_ellipse_mesh(const InclusionGeometry& geom, const MeshParams& params) {
    geom.validate();
    params.validate();

    const double A = geom.interface_a();
    const double B = geom.interface_b();
    const int NS = params.angular_segments;
    const int NI = params.inclusion_rings;
    const int NA = params.annulus_rings;
    const double g = params.grading_exponent;

    Mesh mesh;
    mesh.nodes.reserve(1 + static_cast<size_t>(NS) * (NI + NA));
    mesh.markers.reserve(mesh.nodes.capacity());

    mesh.nodes.emplace_back(0.0, 0.0);
    mesh.markers.push_back(NodeMarker::Interior);

    auto ellipse_pt = [&](double t, int j) {
        const double th = two_pi() * j / NS;
        return Eigen::Vector2d(t * A * std::cos(th), t * B * std::sin(th));
    };

    // Inclusion rings 1..NI, ring NI is the interface.
    for (int i = 1; i <= NI; ++i) {
        const double t = static_cast<double>(i) / NI;
        for (int j = 0; j < NS; ++j) {
            mesh.nodes.push_back(ellipse_pt(t, j));
            mesh.markers.push_back(i == NI ? NodeMarker::Interface : NodeMarker::Interior);
        }
    }

    // Annulus rings 1..NA blend the interface ellipse (s=0) into the unit
    // circle (s=1) with geometric clustering toward the interface.
    auto blend_fraction = [&](int l) {
        if (g == 1.0) return static_cast<double>(l) / NA;
        return (std::pow(g, l) - 1.0) / (std::pow(g, NA) - 1.0);
    };
    for (int l = 1; l <= NA; ++l) {
        const double s = blend_fraction(l);
        for (int j = 0; j < NS; ++j) {
            const double th = two_pi() * j / NS;
            const Eigen::Vector2d e(A * std::cos(th), B * std::sin(th));
            const Eigen::Vector2d c(std::cos(th), std::sin(th));
            Eigen::Vector2d p = (1.0 - s) * e + s * c;
            if (l == NA) p = c;  // boundary nodes exactly on the unit circle
            mesh.nodes.push_back(p);
            mesh.markers.push_back(l == NA ? NodeMarker::Boundary : NodeMarker::Interior);
        }
    }

    auto ring_node = [&](int ring, int j) {  // ring 0 = center fan ring 1
        return 1 + (ring - 1) * NS + (j % NS);
    };

    // Central fan.
    for (int j = 0; j < NS; ++j)
        mesh.triangles.push_back({{0, ring_node(1, j), ring_node(1, j + 1)}, Region::Minus});

    // Quad strips between consecutive rings.
    const int total_rings = NI + NA;
    for (int r = 1; r < total_rings; ++r) {
        const Region reg = (r < NI) ? Region::Minus : Region::Plus;
        for (int j = 0; j < NS; ++j) {
            const int a0 = ring_node(r, j), a1 = ring_node(r, j + 1);
            const int b0 = ring_node(r + 1, j), b1 = ring_node(r + 1, j + 1);
            // Alternate the quad diagonal for symmetry.
            if (j % 2 == 0) {
                mesh.triangles.push_back({{a0, b0, b1}, reg});
                mesh.triangles.push_back({{a0, b1, a1}, reg});
            } else {
                mesh.triangles.push_back({{a0, b0, a1}, reg});
                mesh.triangles.push_back({{b0, b1, a1}, reg});
            }
        }
    }

    check_mesh_invariants(mesh, geom);
    return mesh;
}

Mesh uniform_refine(const Mesh& mesh, const InclusionGeometry& geom) {
    geom.validate();
    Mesh out;
    out.nodes = mesh.nodes;
    out.markers = mesh.markers;
    out.triangles.reserve(mesh.triangles.size() * 4);

    const double A = geom.interface_a();
    const double B = geom.interface_b();

    std::map<std::pair<int, int>, int> edge_mid;
    auto midpoint = [&](int i, int j) {
        auto key = std::minmax(i, j);
        auto it = edge_mid.find(key);
        if (it != edge_mid.end()) return it->second;
        Eigen::Vector2d p = 0.5 * (mesh.nodes[i] + mesh.nodes[j]);
        NodeMarker m = NodeMarker::Interior;
        if (mesh.markers[i] == NodeMarker::Boundary && mesh.markers[j] == NodeMarker::Boundary) {
            p.normalize();
            m = NodeMarker::Boundary;
        } else if (mesh.markers[i] == NodeMarker::Interface &&
                   mesh.markers[j] == NodeMarker::Interface) {
            p = project_to_ellipse(A, B, p);
            m = NodeMarker::Interface;
        }
        const int idx = out.node_count();
        out.nodes.push_back(p);
        out.markers.push_back(m);
        edge_mid.emplace(key, idx);
        return idx;
    };

    for (const auto& tr : mesh.triangles) {
        const int m01 = midpoint(tr.v[0], tr.v[1]);
        const int m12 = midpoint(tr.v[1], tr.v[2]);
        const int m20 = midpoint(tr.v[2], tr.v[0]);
        out.triangles.push_back({{tr.v[0], m01, m20}, tr.region});
        out.triangles.push_back({{tr.v[1], m12, m01}, tr.region});
        out.triangles.push_back({{tr.v[2], m20, m12}, tr.region});
        out.triangles.push_back({{m01, m12, m20}, tr.region});
    }

    check_mesh_invariants(out, geom);
    return out;
}

QualityReport mesh_quality(const Mesh& mesh) {
    QualityReport q;
    q.h_min = std::numeric_limits<double>::infinity();
    q.min_angle_deg = 180.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tr = mesh.triangles[t];
        (tr.region == Region::Plus ? q.plus_triangles : q.minus_triangles)++;
        for (int e = 0; e < 3; ++e) {
            const Eigen::Vector2d& p0 = mesh.nodes[tr.v[e]];
            const Eigen::Vector2d& p1 = mesh.nodes[tr.v[(e + 1) % 3]];
            const Eigen::Vector2d& p2 = mesh.nodes[tr.v[(e + 2) % 3]];
            q.h_max = std::max(q.h_max, (p1 - p0).norm());
            q.h_min = std::min(q.h_min, (p1 - p0).norm());
            const Eigen::Vector2d u = p1 - p0, v = p2 - p0;
            const double ang =
                std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v)) * 180.0 / M_PI;
            q.min_angle_deg = std::min(q.min_angle_deg, ang);
        }
    }
    return q;
}

void check_mesh_invariants(const Mesh& mesh, const InclusionGeometry& geom) {
    const double A = geom.interface_a();
    const double B = geom.interface_b();
    const double h_scale = mesh_quality(mesh).h_max;

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        if (mesh.signed_area(t) <= 1e-14 * h_scale * h_scale)
            throw std::runtime_error("degenerate or misoriented triangle " + std::to_string(t));
        // Region purity against the ellipse indicator at the centroid.
        const Eigen::Vector2d c = mesh.centroid(t);
        const double ind = (c.x() / A) * (c.x() / A) + (c.y() / B) * (c.y() / B);
        const bool inside = ind < 1.0;
        if (inside != (mesh.triangles[t].region == Region::Minus))
            throw std::runtime_error("region tag disagrees with centroid for triangle " +
                                     std::to_string(t));
    }

    for (int i = 0; i < mesh.node_count(); ++i) {
        const Eigen::Vector2d& p = mesh.nodes[i];
        if (mesh.markers[i] == NodeMarker::Boundary) {
            if (std::abs(p.norm() - 1.0) > kCurveTol)
                throw std::runtime_error("boundary node off the unit circle");
        } else if (mesh.markers[i] == NodeMarker::Interface) {
            const double v = (p.x() / A) * (p.x() / A) + (p.y() / B) * (p.y() / B);
            if (std::abs(v - 1.0) > 4.0 * kCurveTol / std::min(A, B))
                throw std::runtime_error("interface node off the ellipse");
        }
    }

    // Conformity: every edge is shared by exactly 2 triangles, or 1 on the boundary.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tr : mesh.triangles)
        for (int e = 0; e < 3; ++e)
            edge_count[std::minmax(tr.v[e], tr.v[(e + 1) % 3])]++;
    for (const auto& [edge, cnt] : edge_count) {
        if (cnt > 2) throw std::runtime_error("non-conforming edge (shared by >2 triangles)");
        if (cnt == 1) {
            if (mesh.markers[edge.first] != NodeMarker::Boundary ||
                mesh.markers[edge.second] != NodeMarker::Boundary)
                throw std::runtime_error("interior edge with a single incident triangle");
        }
    }
}

void write_mesh_ascii(const Mesh& mesh, std::ostream& os) {
    os << "nodes " << mesh.node_count() << " triangles " << mesh.triangle_count() << "\n";
    os.precision(17);
    static const char* marker_name[] = {"interior", "boundary", "interface"};
    for (int i = 0; i < mesh.node_count(); ++i)
        os << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << " "
           << marker_name[static_cast<int>(mesh.markers[i])] << "\n";
    for (const auto& tr : mesh.triangles)
        os << tr.v[0] << " " << tr.v[1] << " " << tr.v[2] << " "
           << (tr.region == Region::Plus ? "plus" : "minus") << "\n";
}

Mesh read_mesh_ascii(std::istream& is) {
    std::string tok;
    int n = 0, t = 0;
    is >> tok >> n >> tok >> t;
    if (!is || n <= 0 || t <= 0) throw std::runtime_error("malformed mesh header");
    Mesh mesh;
    mesh.nodes.resize(n);
    mesh.markers.resize(n);
    for (int i = 0; i < n; ++i) {
        is >> mesh.nodes[i].x() >> mesh.nodes[i].y() >> tok;
        if (tok == "interior") mesh.markers[i] = NodeMarker::Interior;
        else if (tok == "boundary") mesh.markers[i] = NodeMarker::Boundary;
        else if (tok == "interface") mesh.markers[i] = NodeMarker::Interface;
        else throw std::runtime_error("unknown node marker: " + tok);
    }
    mesh.triangles.resize(t);
    for (int k = 0; k < t; ++k) {
        auto& tr = mesh.triangles[k];
        is >> tr.v[0] >> tr.v[1] >> tr.v[2] >> tok;
        if (tok == "plus") tr.region = Region::Plus;
        else if (tok == "minus") tr.region = Region::Minus;
        else throw std::runtime_error("unknown region tag: " + tok);
    }
    if (!is) throw std::runtime_error("truncated mesh file");
    return mesh;
}

void write_mesh_ascii_file(const Mesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_mesh_ascii(mesh, os);
}

Mesh read_mesh_ascii_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_mesh_ascii(is);
}

}  // namespace signspec
