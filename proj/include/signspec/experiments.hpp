#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "signspec/assembly.hpp"
#include "signspec/eigensolver.hpp"
#include "signspec/mesh.hpp"

namespace signspec {

struct RegressionResult {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    int points = 0;
};

// Least-squares line through (log x, log y); all coordinates must be > 0.
RegressionResult fit_loglog(const std::vector<std::pair<double, double>>& points);

struct SweepConfig {
    std::vector<double> deltas = {0.5, 0.35, 0.25, 0.18, 0.12, 0.08, 0.05};
    double a = 0.5, b = 0.25;
    double sigma_plus = 1.0, sigma_minus = -2.5;
    int k_pos = 6, k_neg = 3;
    MeshParams mesh;      // inclusion resolution held fixed across the sweep
    int refinements = 1;  // uniform refinements applied to every mesh
    double tol = 1e-8;
    std::uint64_t seed = 0x5157ab1eu;
    void validate() const;
};

// Annulus ring count grows ~ log(1/delta) and the grading ratio is chosen so
// the first annulus layer matches the inclusion cell size, while the
// inclusion resolution itself is fixed; the triangle count inside the
// inclusion is delta-independent.
MeshParams adapt_mesh_params(const MeshParams& base, const InclusionGeometry& geom);

struct SweepRow {
    double delta = 0;
    double h_max = 0;
    int n = 0;  // 1..k_pos positive branch, -1..-k_neg negative branch
    double lambda = 0;
    double scaled_lambda = 0;  // delta^2 * lambda on the negative branch
    double residual = 0;
    double loc_fraction = 0;  // M-mass fraction within |x| <= 4 delta max(a,b)
    bool ok = true;
};

struct SweepReport {
    std::vector<SweepRow> rows;                          // (delta desc, n)
    RegressionResult negative_fit;                       // log|lambda_-1| vs log(1/delta)
    std::vector<std::pair<double, double>> negative_points;
};

SweepReport run_delta_sweep(const SweepConfig& cfg);

struct HStudyRow {
    int level = 0;
    double h_max = 0;
    double lambda_pos_1 = 0, lambda_neg_1 = 0;
    double order_pos = 0, order_neg = 0;  // NaN until three levels exist
};

// pre_refinements sets the level-0 mesh; very coarse sign-changing meshes
// carry spurious interface modes, so the study starts one refinement in.
std::vector<HStudyRow> run_h_study(const InclusionGeometry& geom, const MaterialPair& mat,
                                   const MeshParams& params, int levels, double tol = 1e-8,
                                   std::uint64_t seed = 0x5157ab1eu, int pre_refinements = 1);

// M-mass fraction of a nodal field inside |x| <= c * delta * max(a,b),
// computed with the lumped P1 mass.
double localization_metric(const Mesh& mesh, const InclusionGeometry& geom,
                           const Eigen::Ref<const Eigen::VectorXd>& nodal, double c);

struct DecayFit {
    bool applicable = false;
    double rate = 0;       // fitted exponential decay rate of |v| vs |x|
    int bins_used = 0;
};

// Exponential fit of the angularly averaged |v| on the annulus between
// 2*delta*max(a,b) and 0.5. Only meaningful for lambda < 0.
DecayFit decay_rate_fit(const Mesh& mesh, const InclusionGeometry& geom,
                        const Eigen::Ref<const Eigen::VectorXd>& nodal, double lambda);

struct SourceRow {
    double delta = 0;
    double err_l2 = 0;
    double err_h1 = 0;
};

// Solves the sign-changing source problem and its sigma = sigma_plus limit
// per delta; errors between the two solutions in discrete L2 / H1 seminorm.
std::vector<SourceRow> run_source_problem(
    const SweepConfig& cfg,
    const std::function<double(const Eigen::Vector2d&)>& f = [](const Eigen::Vector2d&) {
        return 1.0;
    });

// max over both directed sup-inf distances of |1/lambda - 1/mu| between the
// k smallest-modulus truncations of the two lists.
double spectral_inverse_gap(std::vector<double> a, std::vector<double> b, int k);

}  // namespace signspec
