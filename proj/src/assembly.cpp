#include "signspec/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace signspec {

MaterialPair::MaterialPair(double sp, double sm) : sigma_plus(sp), sigma_minus(sm) {
    if (!(sigma_plus > 0)) throw std::invalid_argument("sigma_plus must be positive");
    if (!(sigma_minus < 0)) throw std::invalid_argument("sigma_minus must be negative");
    if (sigma_minus / sigma_plus == -1.0)
        throw std::invalid_argument("excluded contrast kappa = -1");
}

DofMap DofMap::interior_only(const Mesh& mesh) {
    DofMap dm;
    dm.node_to_dof.assign(mesh.node_count(), -1);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (mesh.markers[i] != NodeMarker::Boundary) {
            dm.node_to_dof[i] = static_cast<int>(dm.dof_to_node.size());
            dm.dof_to_node.push_back(i);
        }
    }
    return dm;
}

DofMap DofMap::all_nodes(const Mesh& mesh) {
    DofMap dm;
    dm.node_to_dof.resize(mesh.node_count());
    dm.dof_to_node.resize(mesh.node_count());
    for (int i = 0; i < mesh.node_count(); ++i) dm.node_to_dof[i] = dm.dof_to_node[i] = i;
    return dm;
}

Eigen::VectorXd SparseSym::multiply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const int j = col[k];
            y[i] += val[k] * x[j];
            if (j != i) y[j] += val[k] * x[i];
        }
    }
    return y;
}

double SparseSym::quad_form(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    double s = 0;
    for (int i = 0; i < n; ++i)
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            s += (col[k] == i ? 1.0 : 2.0) * val[k] * x[i] * x[col[k]];
    return s;
}

namespace {

struct Coo {
    int r, c;
    double v;
};

SparseSym compress(int n, std::vector<Coo>& entries) {
    std::sort(entries.begin(), entries.end(), [](const Coo& a, const Coo& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    SparseSym m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (size_t k = 0; k < entries.size();) {
        size_t k2 = k;
        double s = 0;
        while (k2 < entries.size() && entries[k2].r == entries[k].r && entries[k2].c == entries[k].c)
            s += entries[k2++].v;
        m.col.push_back(entries[k].c);
        m.val.push_back(s);
        m.row_ptr[entries[k].r + 1]++;
        k = k2;
    }
    for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
}

}  // namespace

namespace {

AssembledPencil assemble_impl(const Mesh& mesh, double sigma_plus, double sigma_minus,
                              const DofMap& dofmap) {
    const int n = dofmap.n_dof();
    std::vector<Coo> kk, mm;
    kk.reserve(mesh.triangle_count() * 6);
    mm.reserve(mesh.triangle_count() * 6);

    const double h = mesh_quality(mesh).h_max;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tr = mesh.triangles[t];
        const double area = mesh.signed_area(t);
        if (area <= 1e-14 * h * h)
            throw std::runtime_error("degenerate triangle " + std::to_string(t) + " in assembly");
        const double sigma = (tr.region == Region::Minus) ? sigma_minus : sigma_plus;

        // P1 gradients: grad phi_i = perp(opposite edge) / (2 area).
        Eigen::Vector2d grad[3];
        for (int i = 0; i < 3; ++i) {
            const Eigen::Vector2d& pj = mesh.nodes[tr.v[(i + 1) % 3]];
            const Eigen::Vector2d& pk = mesh.nodes[tr.v[(i + 2) % 3]];
            grad[i] = Eigen::Vector2d(pj.y() - pk.y(), pk.x() - pj.x()) / (2.0 * area);
        }

        for (int i = 0; i < 3; ++i) {
            const int gi = dofmap.node_to_dof[tr.v[i]];
            if (gi < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int gj = dofmap.node_to_dof[tr.v[j]];
                if (gj < 0 || gj < gi) continue;
                kk.push_back({gi, gj, sigma * area * grad[i].dot(grad[j])});
                mm.push_back({gi, gj, area / 12.0 * (i == j ? 2.0 : 1.0)});
            }
        }
    }

    AssembledPencil p;
    p.K = compress(n, kk);
    p.M = compress(n, mm);
    p.dofmap = dofmap;
    return p;
}

}  // namespace

AssembledPencil assemble(const Mesh& mesh, const MaterialPair& mat) {
    return assemble(mesh, mat, DofMap::interior_only(mesh));
}

AssembledPencil assemble(const Mesh& mesh, const MaterialPair& mat, const DofMap& dofmap) {
    return assemble_impl(mesh, mat.sigma_plus, mat.sigma_minus, dofmap);
}

AssembledPencil assemble_uniform(const Mesh& mesh, double sigma) {
    return assemble_uniform(mesh, sigma, DofMap::interior_only(mesh));
}

AssembledPencil assemble_uniform(const Mesh& mesh, double sigma, const DofMap& dofmap) {
    if (sigma <= 0) throw std::invalid_argument("uniform coefficient must be positive");
    return assemble_impl(mesh, sigma, sigma, dofmap);
}

double rayleigh(const AssembledPencil& pencil, const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (v.size() != pencil.K.n) throw std::invalid_argument("rayleigh: dimension mismatch");
    const double m = pencil.M.quad_form(v);
    if (m == 0.0) throw std::invalid_argument("rayleigh: zero vector");
    return pencil.K.quad_form(v) / m;
}

void write_matrix_market(const SparseSym& m, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    os << m.n << " " << m.n << " " << m.nnz() << "\n";
    os.precision(17);
    // Matrix Market symmetric storage wants the lower triangle: swap indices.
    for (int i = 0; i < m.n; ++i)
        for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            os << m.col[k] + 1 << " " << i + 1 << " " << m.val[k] << "\n";
}

void write_matrix_market_file(const SparseSym& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_matrix_market(m, os);
}

}  // namespace signspec
