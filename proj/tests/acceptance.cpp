// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "signspec/assembly.hpp"
#include "signspec/contrast.hpp"
#include "signspec/dispersion.hpp"
#include "signspec/eigensolver.hpp"
#include "signspec/experiments.hpp"
#include "signspec/ldlt.hpp"
#include "signspec/mesh.hpp"

using namespace signspec;

namespace {

int failures = 0;
std::vector<std::string> notes;

void note(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    notes.push_back(buf);
}

void report(int id, const char* name, bool ok) {
    std::printf("criterion %d [%s]: %s\n", id, name, ok ? "PASS" : "FAIL");
    for (const auto& n : notes) std::printf("    %s\n", n.c_str());
    notes.clear();
    std::fflush(stdout);
    if (!ok) ++failures;
}

double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// Oracle values expanded with multiplicity, ascending in |value|.
std::vector<double> expand(const std::vector<OracleRoot>& roots) {
    std::vector<double> out;
    for (const auto& r : roots)
        for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.value);
    return out;
}

AssembledPencil assemble_refined(const InclusionGeometry& geom, const MeshParams& params,
                                 int refinements, const MaterialPair& mat, Mesh* mesh_out) {
    Mesh mesh = build_disk_ellipse_mesh(geom, params);
    for (int r = 0; r < refinements; ++r) mesh = uniform_refine(mesh, geom);
    if (mesh_out) *mesh_out = mesh;
    return assemble(mesh, mat);
}

// 1. Mesh refinement study at delta = 0.5 against the reference values
//    lambda_1 = 5.83511, lambda_-1 = -4.88572, second-order in h.
bool criterion1() {
    InclusionGeometry geom{0.5, 0.25, 0.5};
    std::vector<HStudyRow> rows = run_h_study(geom, MaterialPair(1.0, -2.5), MeshParams{}, 5);
    const HStudyRow& last = rows.back();
    note("lambda_1 = %.6f (ref 5.83511, err %.3f%%)", last.lambda_pos_1,
         100 * rel_err(last.lambda_pos_1, 5.83511));
    note("lambda_-1 = %.6f (ref -4.88572, err %.3f%%)", last.lambda_neg_1,
         100 * rel_err(last.lambda_neg_1, -4.88572));
    note("orders: pos %.4f, neg %.4f", last.order_pos, last.order_neg);
    return rel_err(last.lambda_pos_1, 5.83511) < 0.005 &&
           rel_err(last.lambda_neg_1, -4.88572) < 0.010 && last.order_pos > 1.7 &&
           last.order_pos < 2.3 && last.order_neg > 1.7 && last.order_neg < 2.3;
}

// 2. Positive branch converges monotonically to the far-field spectrum over
//    the default delta grid; within 2% per mode at delta = 0.05.
bool criterion2() {
    SweepConfig cfg;
    cfg.k_pos = 3;
    cfg.k_neg = 1;
    cfg.refinements = 4;
    SweepReport rep = run_delta_sweep(cfg);

    std::vector<double> mu = expand(farfield_disk_eigenvalues(cfg.sigma_plus, 3));
    bool ok = true;
    for (int n = 1; n <= 3; ++n) {
        std::vector<double> errs;
        for (const auto& row : rep.rows)
            if (row.n == n) errs.push_back(std::abs(row.lambda - mu[n - 1]));
        for (size_t i = 1; i < errs.size(); ++i) ok = ok && errs[i] < errs[i - 1];
        const double final_rel = errs.back() / mu[n - 1];
        note("mode %d: |lambda - %.5f| decreasing %s, final rel err %.3f%%", n, mu[n - 1],
             std::is_sorted(errs.rbegin(), errs.rend()) ? "yes" : "NO", 100 * final_rel);
        ok = ok && final_rel < 0.02;
    }
    return ok;
}

SweepReport circle_sweep() {
    SweepConfig cfg;
    cfg.a = cfg.b = 0.25;
    cfg.k_pos = 6;
    cfg.k_neg = 3;
    cfg.refinements = 2;
    return run_delta_sweep(cfg);
}

// 3. Negative branch blows up like delta^-2 with the near-field constant.
bool criterion3(const SweepReport& rep) {
    note("log|lambda_-1| vs log(1/delta): slope %.4f, R^2 %.8f", rep.negative_fit.slope,
         rep.negative_fit.r_squared);
    double scaled = 0;
    for (const auto& row : rep.rows)
        if (row.n == -1 && row.delta == 0.05) scaled = row.scaled_lambda;
    std::vector<OracleRoot> nf = nearfield_circle_eigenvalues(1.0, -2.5, 0.25, 1);
    note("delta^2 lambda_-1 at delta=0.05: %.4f (oracle %.4f, err %.3f%%)", scaled, nf[0].value,
         100 * rel_err(scaled, nf[0].value));
    return rep.negative_fit.slope > 1.9 && rep.negative_fit.slope < 2.1 &&
           rep.negative_fit.r_squared >= 0.999 && rel_err(scaled, nf[0].value) < 0.02;
}

// 4. Spectral gap: |lambda_-1| delta^{3/2} grows as delta shrinks and no
//    computed eigenvalue falls strictly between lambda_-1 and zero.
bool criterion4(const SweepReport& rep) {
    std::vector<std::pair<double, double>> lam1;  // (delta, lambda_-1), delta descending
    for (const auto& row : rep.rows)
        if (row.n == -1) lam1.push_back({row.delta, row.lambda});

    bool ok = true;
    for (size_t i = 1; i < lam1.size(); ++i) {
        double prev = std::abs(lam1[i - 1].second) * std::pow(lam1[i - 1].first, 1.5);
        double cur = std::abs(lam1[i].second) * std::pow(lam1[i].first, 1.5);
        ok = ok && cur > prev;
    }
    note("|lambda_-1| delta^1.5 strictly increasing: %s", ok ? "yes" : "NO");

    bool gap = true;
    for (const auto& [d, l1] : lam1)
        for (const auto& row : rep.rows)
            if (row.delta == d && row.lambda > l1 && row.lambda < 0) gap = false;
    note("no eigenvalue inside (lambda_-1, 0): %s", gap ? "yes" : "NO");
    return ok && gap;
}

// 5. Localization of the first negative eigenfunction at delta = 0.05.
bool criterion5() {
    InclusionGeometry geom{0.5, 0.25, 0.05};
    MeshParams params = adapt_mesh_params(MeshParams{}, geom);
    Mesh mesh;
    AssembledPencil p = assemble_refined(geom, params, 3, MaterialPair(1.0, -2.5), &mesh);

    LanczosConfig cfg;
    cfg.n_positive = 1;
    cfg.n_negative = 1;
    cfg.tol = 1e-8;
    EigenResult res = solve_smallest_modulus(p, cfg);

    auto to_nodal = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd nodal = Eigen::VectorXd::Zero(mesh.node_count());
        for (int d = 0; d < p.dofmap.n_dof(); ++d) nodal[p.dofmap.dof_to_node[d]] = v[d];
        return nodal;
    };
    Eigen::VectorXd vneg = to_nodal(res.negative[0].vector);
    Eigen::VectorXd vpos = to_nodal(res.positive[0].vector);

    const double frac_neg = localization_metric(mesh, geom, vneg, 4.0);
    const double frac_pos = localization_metric(mesh, geom, vpos, 4.0);
    DecayFit fit = decay_rate_fit(mesh, geom, vneg, res.negative[0].value);
    const double rate_floor = 0.5 * std::sqrt(std::abs(res.negative[0].value));

    note("negative mode mass fraction in the 4 delta ball: %.4f (need >= 0.90)", frac_neg);
    note("positive mode mass fraction: %.4f (need <= 0.05)", frac_pos);
    note("decay rate %.2f over %d bins (need >= %.2f)", fit.rate, fit.bins_used, rate_floor);
    return frac_neg >= 0.90 && frac_pos <= 0.05 && fit.applicable && fit.rate >= rate_floor;
}

// 6. FEM vs full-problem oracle on the concentric-circle configuration,
//    with inertia-certified multiplicities.
bool criterion6() {
    InclusionGeometry geom{0.25, 0.25, 0.25};
    MeshParams params = adapt_mesh_params(MeshParams{}, geom);
    AssembledPencil p = assemble_refined(geom, params, 4, MaterialPair(1.0, -2.5), nullptr);

    LanczosConfig cfg;
    cfg.n_positive = 3;
    cfg.n_negative = 2;
    cfg.tol = 1e-9;
    EigenResult res = solve_smallest_modulus(p, cfg);

    FullSpectrum oracle = fullproblem_disk_eigenvalues(1.0, -2.5, 0.25, 0.25, 3, 2);
    std::vector<double> opos = expand(oracle.positive), oneg = expand(oracle.negative);

    bool ok = true;
    for (int i = 0; i < 3; ++i) {
        double e = rel_err(res.positive[i].value, opos[i]);
        note("positive %d: fem %.6f vs oracle %.6f (err %.3f%%)", i + 1, res.positive[i].value,
             opos[i], 100 * e);
        ok = ok && e < 0.005;
    }
    for (int i = 0; i < 2; ++i) {
        double e = rel_err(res.negative[i].value, oneg[i]);
        note("negative %d: fem %.4f vs oracle %.4f (err %.3f%%)", i + 1, res.negative[i].value,
             oneg[i], 100 * e);
        ok = ok && e < 0.005;
    }

    // Cluster the computed values and recover each cluster size from the
    // inertia difference at bracketing shifts.
    std::vector<double> vals;
    for (int i = 0; i < 3; ++i) vals.push_back(res.positive[i].value);
    for (int i = 0; i < 2; ++i) vals.push_back(res.negative[i].value);
    std::sort(vals.begin(), vals.end());
    size_t i = 0;
    while (i < vals.size()) {
        size_t j = i + 1;
        while (j < vals.size() && vals[j] - vals[j - 1] < 2e-3 * std::abs(vals[i])) ++j;
        const double margin = 2e-3 * std::abs(vals[i]);
        const int below = count_below(p, vals[i] - margin);
        const int above = count_below(p, vals[j - 1] + margin);
        note("cluster near %.4f: size %zu, inertia count %d", vals[i], j - i, above - below);
        ok = ok && above - below == int(j - i);
        i = j;
    }
    return ok;
}

// 7. Critical contrast set for the 2:1 ellipse and for a circle.
bool criterion7() {
    CriticalSet cs = critical_contrasts(0.5, 0.25, 16);
    bool ok = cs.eta[0] == -2.0;
    note("eta_1 = %g for a = 2b", cs.eta[0]);
    ok = ok && check_admissible(-2.5, 0.5, 0.25, 1e-6).verdict == ContrastVerdict::Admissible;
    ok = ok && check_admissible(-2.0, 0.5, 0.25, 1e-6).verdict == ContrastVerdict::Critical;
    ok = ok && check_admissible(-1.0, 0.5, 0.25, 1e-6).verdict == ContrastVerdict::Critical;
    note("verdicts: -2.5 %s, -2 %s, -1 %s",
         check_admissible(-2.5, 0.5, 0.25, 1e-6).describe().c_str(),
         check_admissible(-2.0, 0.5, 0.25, 1e-6).describe().c_str(),
         check_admissible(-1.0, 0.5, 0.25, 1e-6).describe().c_str());
    CriticalSet circ = critical_contrasts(0.3, 0.3, 16);
    ok = ok && circ.eta.empty() && circ.distance(-1.0) == 0.0;
    note("circle set reduces to {-1}: %s", circ.eta.empty() ? "yes" : "NO");
    return ok;
}

// 8. Unit-level exactness and the residual certificate.
bool criterion8() {
    bool ok = true;

    // Closed-form element matrices on the unit right triangle.
    Mesh tri;
    tri.nodes = {{0, 0}, {1, 0}, {0, 1}};
    tri.markers = {NodeMarker::Interior, NodeMarker::Interior, NodeMarker::Interior};
    tri.triangles.push_back({{0, 1, 2}, Region::Plus});
    AssembledPencil unit = assemble(tri, MaterialPair(1.0, -2.5), DofMap::all_nodes(tri));
    const double kref[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    auto at = [](const SparseSym& m, int r, int c) {
        if (r > c) std::swap(r, c);
        for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
            if (m.col[k] == c) return m.val[k];
        return 0.0;
    };
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            ok = ok && std::abs(at(unit.K, r, c) - kref[r][c]) < 1e-14;
            ok = ok && std::abs(at(unit.M, r, c) - (r == c ? 2.0 : 1.0) / 24.0) < 1e-14;
        }
    note("P1 element matrices match closed forms to 1e-14: %s", ok ? "yes" : "NO");

    InclusionGeometry geom{0.5, 0.25, 0.5};
    Mesh mesh = build_disk_ellipse_mesh(geom, MeshParams{});
    AssembledPencil p = assemble(mesh, MaterialPair(1.0, -2.5), DofMap::all_nodes(mesh));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p.K.n);
    const bool rows_zero = p.K.multiply(ones).lpNorm<Eigen::Infinity>() < 1e-12;
    note("stiffness rows sum to zero: %s", rows_zero ? "yes" : "NO");
    const bool m_spd = IndefiniteFactorization(p.M).inertia().neg == 0;
    note("mass matrix positive definite: %s", m_spd ? "yes" : "NO");
    ok = ok && rows_zero && m_spd;

    // Determinism under a fixed seed.
    AssembledPencil pin = assemble(mesh, MaterialPair(1.0, -2.5));
    EigenResult r1 = solve_smallest_modulus(pin), r2 = solve_smallest_modulus(pin);
    bool det = r1.positive.size() == r2.positive.size();
    for (size_t i = 0; det && i < r1.positive.size(); ++i)
        det = r1.positive[i].value == r2.positive[i].value;
    note("eigensolver bitwise deterministic: %s", det ? "yes" : "NO");
    ok = ok && det;

    // Residual certificate on synthetic perturbations: the bound must
    // dominate the distance to the computed spectrum.
    std::vector<double> spectrum;
    for (const auto& ep : r1.positive) spectrum.push_back(ep.value);
    for (const auto& ep : r1.negative) spectrum.push_back(ep.value);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    bool cert = true;
    for (double eps : {0.0, 1e-6, 1e-3, 1e-2}) {
        Eigen::VectorXd v = r1.positive[0].vector;
        for (int k = 0; k < v.size(); ++k) v[k] += eps * gauss(rng);
        const double lam = rayleigh(pin, v);
        const double rho = residual_distance_bound(pin, lam, v);
        double dist = 1e300;
        for (double mu : spectrum) dist = std::min(dist, std::abs(lam - mu));
        cert = cert && dist <= rho * (1.0 + 1e-7);
    }
    note("residual bound dominates the spectral distance: %s", cert ? "yes" : "NO");
    return ok && cert;
}

// 9. Source-problem errors decay monotonically, L2 faster than H1.
bool criterion9() {
    SweepConfig cfg;
    cfg.refinements = 1;
    std::vector<SourceRow> rows = run_source_problem(cfg);

    bool mono = true;
    std::vector<std::pair<double, double>> l2, h1;
    for (const auto& row : rows) {
        l2.push_back({1.0 / row.delta, row.err_l2});
        h1.push_back({1.0 / row.delta, row.err_h1});
    }
    for (size_t i = 1; i < rows.size(); ++i)
        mono = mono && rows[i].err_l2 < rows[i - 1].err_l2 && rows[i].err_h1 < rows[i - 1].err_h1;
    RegressionResult fl2 = fit_loglog(l2), fh1 = fit_loglog(h1);
    note("monotone decrease in both norms: %s", mono ? "yes" : "NO");
    note("rates vs 1/delta: L2 slope %.3f, H1 slope %.3f (reported, not pinned)", -fl2.slope,
         -fh1.slope);
    return mono && -fl2.slope > -fh1.slope;
}

}  // namespace

int main() {
    report(1, "refinement study at delta 0.5", criterion1());
    report(2, "positive branch to far-field", criterion2());
    SweepReport circ = circle_sweep();
    report(3, "negative branch delta^-2 law", criterion3(circ));
    report(4, "spectral gap below zero", criterion4(circ));
    report(5, "negative mode localization", criterion5());
    report(6, "oracle/FEM cross-validation", criterion6());
    report(7, "critical contrast set", criterion7());
    report(8, "unit-level exactness", criterion8());
    report(9, "source-problem convergence", criterion9());
    std::printf("%s (%d/9 passed)\n", failures ? "ACCEPTANCE: FAIL" : "ACCEPTANCE: PASS",
                9 - failures);
    return failures ? 1 : 0;
}
