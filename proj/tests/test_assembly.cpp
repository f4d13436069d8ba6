#include <doctest.h>

#include <cmath>
#include <sstream>

#include "signspec/assembly.hpp"
#include "signspec/ldlt.hpp"

using namespace signspec;

namespace {

Mesh single_triangle(Eigen::Vector2d p0, Eigen::Vector2d p1, Eigen::Vector2d p2,
                     Region region = Region::Plus) {
    Mesh mesh;
    mesh.nodes = {p0, p1, p2};
    mesh.markers = {NodeMarker::Interior, NodeMarker::Interior, NodeMarker::Interior};
    mesh.triangles.push_back({{0, 1, 2}, region});
    return mesh;
}

double entry(const SparseSym& m, int i, int j) {
    if (i > j) std::swap(i, j);
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
        if (m.col[k] == j) return m.val[k];
    return 0.0;
}

}  // namespace

TEST_CASE("material pair validation") {
    CHECK_THROWS_AS(MaterialPair(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(MaterialPair(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MaterialPair(1.0, -1.0), std::invalid_argument);  // kappa = -1
    CHECK(MaterialPair(1.0, -2.5).contrast() == doctest::Approx(-2.5));
}

TEST_CASE("unit right triangle matches the closed-form element matrices") {
    // Vertices (0,0), (1,0), (0,1); area 1/2; sigma = 1 on the Plus region.
    Mesh mesh = single_triangle({0, 0}, {1, 0}, {0, 1});
    AssembledPencil p = assemble(mesh, MaterialPair(2.0, -2.5), DofMap::all_nodes(mesh));

    // K = sigma/2 * [[2,-1,-1],[-1,1,0],[-1,0,1]] for this triangle.
    const double s = 2.0;
    CHECK(entry(p.K, 0, 0) == doctest::Approx(s * 1.0).epsilon(1e-14));
    CHECK(entry(p.K, 0, 1) == doctest::Approx(-s * 0.5).epsilon(1e-14));
    CHECK(entry(p.K, 0, 2) == doctest::Approx(-s * 0.5).epsilon(1e-14));
    CHECK(entry(p.K, 1, 1) == doctest::Approx(s * 0.5).epsilon(1e-14));
    CHECK(entry(p.K, 1, 2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(entry(p.K, 2, 2) == doctest::Approx(s * 0.5).epsilon(1e-14));

    // M = area/12 * [[2,1,1],[1,2,1],[1,1,2]].
    const double a12 = 0.5 / 12.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            CHECK(entry(p.M, i, j) == doctest::Approx(a12 * (i == j ? 2.0 : 1.0)).epsilon(1e-14));
}

TEST_CASE("stiffness rows sum to zero and mass sums to the area") {
    InclusionGeometry geom{0.5, 0.25, 0.5};
    Mesh mesh = uniform_refine(build_disk_ellipse_mesh(geom, MeshParams{}), geom);
    AssembledPencil p = assemble(mesh, MaterialPair(1.0, -2.5), DofMap::all_nodes(mesh));

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p.K.n);
    CHECK(p.K.multiply(ones).lpNorm<Eigen::Infinity>() < 1e-12);

    // Sum over M = polygonal area of the mesh, close to pi for the unit disk.
    double area = 0;
    for (int t = 0; t < mesh.triangle_count(); ++t) area += mesh.signed_area(t);
    CHECK(ones.dot(p.M.multiply(ones)) == doctest::Approx(area).epsilon(1e-13));
    CHECK(area == doctest::Approx(M_PI).epsilon(5e-3));
}

TEST_CASE("mass matrix is positive definite") {
    InclusionGeometry geom{0.5, 0.25, 0.25};
    Mesh mesh = build_disk_ellipse_mesh(geom, MeshParams{});
    AssembledPencil p = assemble(mesh, MaterialPair(1.0, -2.5));
    IndefiniteFactorization f(p.M);
    CHECK(f.inertia().neg == 0);
    CHECK(f.inertia().zero == 0);
    CHECK(f.inertia().pos == p.M.n);
}

TEST_CASE("assembly is linear in the coefficient") {
    InclusionGeometry geom{0.5, 0.25, 0.5};
    Mesh mesh = build_disk_ellipse_mesh(geom, MeshParams{});
    AssembledPencil p1 = assemble(mesh, MaterialPair(1.0, -2.5));
    AssembledPencil p2 = assemble(mesh, MaterialPair(2.0, -5.0));
    REQUIRE(p1.K.nnz() == p2.K.nnz());
    for (int k = 0; k < p1.K.nnz(); ++k)
        CHECK(p2.K.val[k] == doctest::Approx(2.0 * p1.K.val[k]).epsilon(1e-14));
    // The mass matrix carries no coefficient.
    for (int k = 0; k < p1.M.nnz(); ++k) CHECK(p2.M.val[k] == p1.M.val[k]);
}

TEST_CASE("boundary elimination drops exactly the boundary nodes") {
    InclusionGeometry geom{0.5, 0.25, 0.5};
    Mesh mesh = build_disk_ellipse_mesh(geom, MeshParams{});
    const DofMap dm = DofMap::interior_only(mesh);
    CHECK(dm.n_dof() == mesh.node_count() - int(mesh.boundary_nodes().size()));
    for (int i : mesh.boundary_nodes()) CHECK(dm.node_to_dof[i] == -1);
}

TEST_CASE("degenerate triangles are rejected") {
    Mesh mesh = single_triangle({0, 0}, {1, 0}, {2, 0});  // collinear
    CHECK_THROWS_AS(assemble(mesh, MaterialPair(1.0, -2.5), DofMap::all_nodes(mesh)),
                    std::runtime_error);
}

TEST_CASE("rayleigh quotient is consistent with the quadratic forms") {
    Mesh mesh = single_triangle({0, 0}, {1, 0}, {0, 1});
    AssembledPencil p = assemble(mesh, MaterialPair(1.0, -2.5), DofMap::all_nodes(mesh));
    Eigen::VectorXd v(3);
    v << 1.0, -2.0, 0.5;
    CHECK(rayleigh(p, v) == doctest::Approx(p.K.quad_form(v) / p.M.quad_form(v)));
    CHECK_THROWS_AS(rayleigh(p, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("matrix market export") {
    Mesh mesh = single_triangle({0, 0}, {1, 0}, {0, 1});
    AssembledPencil p = assemble(mesh, MaterialPair(1.0, -2.5), DofMap::all_nodes(mesh));
    std::ostringstream os;
    write_matrix_market(p.M, os);
    const std::string text = os.str();
    CHECK(text.find("%%MatrixMarket matrix coordinate real symmetric") == 0);
    CHECK(text.find("3 3 6") != std::string::npos);
}
