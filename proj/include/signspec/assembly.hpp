#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

#include "signspec/mesh.hpp"

namespace signspec {

// Piecewise-constant diffusion coefficient; sigma_minus < 0 < sigma_plus.
struct MaterialPair {
    double sigma_plus;
    double sigma_minus;

    MaterialPair(double sp, double sm);
    double contrast() const { return sigma_minus / sigma_plus; }
};

// Interior nodes <-> degrees of freedom; Dirichlet (boundary) nodes map to -1.
struct DofMap {
    std::vector<int> node_to_dof;
    std::vector<int> dof_to_node;

    static DofMap interior_only(const Mesh& mesh);
    static DofMap all_nodes(const Mesh& mesh);
    int n_dof() const { return static_cast<int>(dof_to_node.size()); }
};

// Symmetric sparse matrix, upper triangle in CSR (col >= row, sorted).
struct SparseSym {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    Eigen::VectorXd multiply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    double quad_form(const Eigen::Ref<const Eigen::VectorXd>& x) const;  // x' A x
    int nnz() const { return static_cast<int>(val.size()); }
};

struct AssembledPencil {
    SparseSym K;  // stiffness, sign-indefinite
    SparseSym M;  // mass, SPD
    DofMap dofmap;
};

// P1 stiffness/mass in closed form per triangle; Dirichlet rows/columns
// eliminated according to dofmap (pass DofMap::all_nodes to keep everything).
AssembledPencil assemble(const Mesh& mesh, const MaterialPair& mat);
AssembledPencil assemble(const Mesh& mesh, const MaterialPair& mat, const DofMap& dofmap);

// Same assembly with a single coefficient everywhere (limit operator, or the
// sigma = 1 matrices used as discrete H1/L2 norms).
AssembledPencil assemble_uniform(const Mesh& mesh, double sigma);
AssembledPencil assemble_uniform(const Mesh& mesh, double sigma, const DofMap& dofmap);

double rayleigh(const AssembledPencil& pencil, const Eigen::Ref<const Eigen::VectorXd>& v);

// Matrix Market coordinate format (symmetric real, lower triangle entries).
void write_matrix_market(const SparseSym& m, std::ostream& os);
void write_matrix_market_file(const SparseSym& m, const std::string& path);

}  // namespace signspec
