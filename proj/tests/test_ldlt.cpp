#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <random>

#include "signspec/assembly.hpp"
#include "signspec/ldlt.hpp"
#include "signspec/mesh.hpp"

using namespace signspec;

namespace {

SparseSym from_dense(const Eigen::MatrixXd& a, double drop_tol = 0.0) {
    SparseSym s;
    s.n = int(a.rows());
    s.row_ptr.assign(s.n + 1, 0);
    for (int i = 0; i < s.n; ++i) {
        s.row_ptr[i] = int(s.col.size());
        for (int j = i; j < s.n; ++j)
            if (j == i || std::abs(a(i, j)) > drop_tol) {
                s.col.push_back(j);
                s.val.push_back(a(i, j));
            }
    }
    s.row_ptr[s.n] = int(s.col.size());
    return s;
}

Eigen::MatrixXd random_symmetric(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
    return a;
}

}  // namespace

TEST_CASE("solves random dense symmetric indefinite systems") {
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
        const int n = 12;
        Eigen::MatrixXd a = random_symmetric(n, seed);
        SparseSym s = from_dense(a);
        IndefiniteFactorization f(s);

        std::mt19937 rng(seed + 100);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) b[i] = u(rng);

        Eigen::VectorXd x = f.solve(b);
        CHECK((a * x - b).norm() < 1e-10 * b.norm());
        CHECK(f.reconstruction_error(s, {}) < 1e-12);
    }
}

TEST_CASE("inertia matches the eigenvalue signs") {
    for (unsigned seed : {7u, 8u, 9u}) {
        const int n = 15;
        Eigen::MatrixXd a = random_symmetric(n, seed);
        SparseSym s = from_dense(a);
        IndefiniteFactorization f(s);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        int pos = 0, neg = 0;
        for (int i = 0; i < n; ++i) (es.eigenvalues()[i] > 0 ? pos : neg)++;
        CHECK(f.inertia().pos == pos);
        CHECK(f.inertia().neg == neg);
        CHECK(f.inertia().zero == 0);
    }
}

TEST_CASE("zero diagonal forces a 2x2 pivot") {
    // [[0,1],[1,0]] has no nonzero 1x1 leading pivot; eigenvalues are +-1.
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, 1, 0;
    SparseSym s = from_dense(a);
    IndefiniteFactorization f(s);
    CHECK(f.inertia().pos == 1);
    CHECK(f.inertia().neg == 1);

    Eigen::Vector2d b(3.0, -5.0);
    Eigen::VectorXd x = f.solve(b);
    CHECK(x[0] == doctest::Approx(-5.0));
    CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("larger matrix with zero diagonal blocks") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a(0, 1) = a(1, 0) = 2.0;
    a(2, 2) = -3.0;
    a(3, 4) = a(4, 3) = 1.5;
    a(3, 3) = 1e-14;  // effectively zero pivot, partner follows
    a(5, 5) = 4.0;
    a(0, 5) = a(5, 0) = 0.25;
    SparseSym s = from_dense(a);
    IndefiniteFactorization f(s);
    CHECK(f.inertia().pos + f.inertia().neg == 6);

    Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0);
    CHECK((a * f.solve(b) - b).norm() < 1e-9 * b.norm());
}

TEST_CASE("a singular matrix raises ZeroPivotError") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 0) = 1.0;  // rows 1,2 identically zero
    SparseSym s = from_dense(a);
    CHECK_THROWS_AS(IndefiniteFactorization{s}, ZeroPivotError);
}

TEST_CASE("shifted factorization of a FEM pencil") {
    InclusionGeometry geom{0.5, 0.25, 0.5};
    Mesh mesh = build_disk_ellipse_mesh(geom, MeshParams{});
    AssembledPencil p = assemble(mesh, MaterialPair(1.0, -2.5));

    IndefiniteFactorization f(p.K, p.M, 2.0);
    CHECK(f.reconstruction_error(p.K, p.M) < 1e-12);

    Eigen::VectorXd b = Eigen::VectorXd::Ones(p.K.n);
    Eigen::VectorXd x = f.solve(b);
    Eigen::VectorXd r = p.K.multiply(x) - 2.0 * p.M.multiply(x) - b;
    CHECK(r.norm() < 1e-10 * b.norm());
}

TEST_CASE("count_below agrees with dense generalized eigenvalues") {
    InclusionGeometry geom{0.5, 0.25, 0.5};
    Mesh mesh = build_disk_ellipse_mesh(geom, MeshParams{});
    AssembledPencil p = assemble(mesh, MaterialPair(1.0, -2.5));
    const int n = p.K.n;

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = p.K.row_ptr[i]; k < p.K.row_ptr[i + 1]; ++k)
            K(i, p.K.col[k]) = K(p.K.col[k], i) = p.K.val[k];
        for (int k = p.M.row_ptr[i]; k < p.M.row_ptr[i + 1]; ++k)
            M(i, p.M.col[k]) = M(p.M.col[k], i) = p.M.val[k];
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(K, M);

    for (double sigma : {-50.0, -5.0, 0.0, 3.0, 10.0, 40.0}) {
        int expected = 0;
        for (int i = 0; i < n; ++i)
            if (ges.eigenvalues()[i] < sigma) ++expected;
        CHECK(count_below(p, sigma) == expected);
    }
}

TEST_CASE("reverse Cuthill-McKee returns a permutation and shrinks the profile") {
    InclusionGeometry geom{0.5, 0.25, 0.5};
    Mesh mesh = build_disk_ellipse_mesh(geom, MeshParams{});
    AssembledPencil p = assemble(mesh, MaterialPair(1.0, -2.5));

    std::vector<int> order = reverse_cuthill_mckee(p.K);
    REQUIRE(int(order.size()) == p.K.n);
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < p.K.n; ++i) CHECK(sorted[i] == i);
}
