#include "signspec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace signspec {

namespace {

RegressionResult fit_line(const std::vector<std::pair<double, double>>& pts) {
    const int n = int(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    RegressionResult r;
    r.points = n;
    const double det = n * sxx - sx * sx;
    r.slope = (n * sxy - sx * sy) / det;
    r.intercept = (sy - r.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (auto [x, y] : pts) {
        const double e = y - (r.intercept + r.slope * x);
        ss_res += e * e;
        ss_tot += (y - ybar) * (y - ybar);
    }
    r.r_squared = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return r;
}

// Lumped P1 mass: one third of each triangle area to each vertex.
std::vector<double> lumped_mass(const Mesh& mesh) {
    std::vector<double> m(mesh.nodes.size(), 0.0);
    for (const Triangle& t : mesh.triangles) {
        const auto& p0 = mesh.nodes[t.v[0]];
        const auto& p1 = mesh.nodes[t.v[1]];
        const auto& p2 = mesh.nodes[t.v[2]];
        const double area =
            0.5 * std::abs((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                           (p2.x() - p0.x()) * (p1.y() - p0.y()));
        for (int k = 0; k < 3; ++k) m[t.v[k]] += area / 3.0;
    }
    return m;
}

Eigen::VectorXd to_nodal(const Mesh& mesh, const DofMap& dofmap,
                         const Eigen::Ref<const Eigen::VectorXd>& dof_values) {
    Eigen::VectorXd nodal = Eigen::VectorXd::Zero(Eigen::Index(mesh.nodes.size()));
    for (int node = 0; node < int(mesh.nodes.size()); ++node)
        if (dofmap.node_to_dof[node] >= 0) nodal[node] = dof_values[dofmap.node_to_dof[node]];
    return nodal;
}

Mesh build_sweep_mesh(const SweepConfig& cfg, double delta) {
    InclusionGeometry geom{cfg.a, cfg.b, delta};
    Mesh mesh = build_disk_ellipse_mesh(geom, adapt_mesh_params(cfg.mesh, geom));
    for (int r = 0; r < cfg.refinements; ++r) mesh = uniform_refine(mesh, geom);
    return mesh;
}

}  // namespace

RegressionResult fit_loglog(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_loglog needs at least 3 points");
    std::vector<std::pair<double, double>> logs;
    logs.reserve(points.size());
    for (auto [x, y] : points) {
        if (x <= 0 || y <= 0) throw std::invalid_argument("fit_loglog needs positive coordinates");
        logs.emplace_back(std::log(x), std::log(y));
    }
    return fit_line(logs);
}

void SweepConfig::validate() const {
    if (deltas.empty()) throw std::invalid_argument("empty delta list");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i] <= 0 || deltas[i] > 1) throw std::invalid_argument("delta outside (0,1]");
        if (i && deltas[i] >= deltas[i - 1])
            throw std::invalid_argument("deltas must be strictly decreasing");
    }
    if (a <= 0 || b <= 0) throw std::invalid_argument("semi-axes must be positive");
    MaterialPair(sigma_plus, sigma_minus);  // sign/contrast validation
    if (k_pos < 1 || k_neg < 0) throw std::invalid_argument("bad eigen counts");
    if (refinements < 0) throw std::invalid_argument("refinements must be >= 0");
    mesh.validate();
}

MeshParams adapt_mesh_params(const MeshParams& base, const InclusionGeometry& geom) {
    MeshParams p = base;
    const int extra = int(std::ceil(std::log2(std::max(1.0, 0.5 / geom.delta))));
    p.annulus_rings = base.annulus_rings + extra * std::max(2, base.annulus_rings / 3);

    // Geometric grading: first annulus layer as thick as an inclusion cell.
    const double r_i = geom.delta * std::max(geom.a, geom.b);
    const double span = 1.0 - r_i;
    const double target = r_i / std::max(1, base.inclusion_rings);
    if (span / p.annulus_rings > target) {
        double lo = 1.0 + 1e-12, hi = 4.0;
        auto first_layer = [&](double g) {
            return span * (g - 1.0) / (std::pow(g, p.annulus_rings) - 1.0);
        };
        while (first_layer(hi) > target) hi *= 2;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (first_layer(mid) > target ? lo : hi) = mid;
        }
        p.grading_exponent = std::max(base.grading_exponent, 0.5 * (lo + hi));
    }
    return p;
}

SweepReport run_delta_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepReport report;
    for (double delta : cfg.deltas) {
        InclusionGeometry geom{cfg.a, cfg.b, delta};
        Mesh mesh = build_sweep_mesh(cfg, delta);
        const double h_max = mesh_quality(mesh).h_max;
        AssembledPencil pencil = assemble(mesh, MaterialPair(cfg.sigma_plus, cfg.sigma_minus));

        LanczosConfig lcfg;
        lcfg.n_positive = cfg.k_pos;
        lcfg.n_negative = cfg.k_neg;
        lcfg.tol = cfg.tol;
        lcfg.seed = cfg.seed;
        EigenResult res;
        bool ok = true;
        try {
            res = solve_smallest_modulus(pencil, lcfg);
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok) {
            SweepRow row;
            row.delta = delta;
            row.h_max = h_max;
            row.ok = false;
            report.rows.push_back(row);
            continue;
        }

        auto emit = [&](const EigenPair& p, int n, bool negative) {
            SweepRow row;
            row.delta = delta;
            row.h_max = h_max;
            row.n = n;
            row.lambda = p.value;
            row.scaled_lambda = negative ? delta * delta * p.value : p.value;
            row.residual = p.residual;
            row.loc_fraction =
                4.0 * delta * std::max(cfg.a, cfg.b) < 1.0
                    ? localization_metric(mesh, geom, to_nodal(mesh, pencil.dofmap, p.vector), 4.0)
                    : std::numeric_limits<double>::quiet_NaN();
            report.rows.push_back(row);
        };
        for (int i = 0; i < int(res.positive.size()); ++i) emit(res.positive[i], i + 1, false);
        for (int i = 0; i < int(res.negative.size()); ++i) emit(res.negative[i], -(i + 1), true);

        if (!res.negative.empty())
            report.negative_points.emplace_back(1.0 / delta, std::abs(res.negative[0].value));
    }
    if (report.negative_points.size() >= 3)
        report.negative_fit = fit_loglog(report.negative_points);
    return report;
}

std::vector<HStudyRow> run_h_study(const InclusionGeometry& geom, const MaterialPair& mat,
                                   const MeshParams& params, int levels, double tol,
                                   std::uint64_t seed, int pre_refinements) {
    if (levels < 1) throw std::invalid_argument("levels must be >= 1");
    if (pre_refinements < 0) throw std::invalid_argument("pre_refinements must be >= 0");
    std::vector<HStudyRow> table;
    Mesh mesh = build_disk_ellipse_mesh(geom, params);
    for (int r = 0; r < pre_refinements; ++r) mesh = uniform_refine(mesh, geom);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int level = 0; level < levels; ++level) {
        if (level > 0) mesh = uniform_refine(mesh, geom);
        AssembledPencil pencil = assemble(mesh, mat);
        LanczosConfig lcfg;
        lcfg.n_positive = 1;
        lcfg.n_negative = 1;
        lcfg.tol = tol;
        lcfg.seed = seed;
        EigenResult res = solve_smallest_modulus(pencil, lcfg);

        HStudyRow row;
        row.level = level;
        row.h_max = mesh_quality(mesh).h_max;
        row.lambda_pos_1 = res.positive.at(0).value;
        row.lambda_neg_1 = res.negative.at(0).value;
        row.order_pos = row.order_neg = nan;
        if (level >= 2) {
            const auto& r1 = table[level - 2];
            const auto& r2 = table[level - 1];
            auto order = [&](double a0, double a1, double a2) {
                const double q = (a0 - a1) / (a1 - a2);
                return q > 0 ? std::log2(q) : nan;
            };
            row.order_pos = order(r1.lambda_pos_1, r2.lambda_pos_1, row.lambda_pos_1);
            row.order_neg = order(r1.lambda_neg_1, r2.lambda_neg_1, row.lambda_neg_1);
        }
        table.push_back(row);
    }
    return table;
}

double localization_metric(const Mesh& mesh, const InclusionGeometry& geom,
                           const Eigen::Ref<const Eigen::VectorXd>& nodal, double c) {
    if (nodal.size() != Eigen::Index(mesh.nodes.size()))
        throw std::invalid_argument("nodal value count must match node count");
    const double radius = c * geom.delta * std::max(geom.a, geom.b);
    if (radius >= 1.0) throw std::invalid_argument("localization ball must stay inside the disk");

    const auto m = lumped_mass(mesh);
    double inside = 0, total = 0;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const double w = m[i] * nodal[Eigen::Index(i)] * nodal[Eigen::Index(i)];
        total += w;
        if (mesh.nodes[i].norm() <= radius) inside += w;
    }
    if (total <= 0) throw std::invalid_argument("zero field");
    return inside / total;
}

DecayFit decay_rate_fit(const Mesh& mesh, const InclusionGeometry& geom,
                        const Eigen::Ref<const Eigen::VectorXd>& nodal, double lambda) {
    DecayFit fit;
    if (lambda >= 0) return fit;  // not applicable on the positive branch
    if (nodal.size() != Eigen::Index(mesh.nodes.size()))
        throw std::invalid_argument("nodal value count must match node count");

    const double r_lo = 2.0 * geom.delta * std::max(geom.a, geom.b);
    const double r_hi = 0.5;
    if (r_lo >= r_hi) throw std::invalid_argument("annulus for the decay fit is empty");

    constexpr int kBins = 24;
    std::vector<double> sum(kBins, 0.0);
    std::vector<int> cnt(kBins, 0);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const double r = mesh.nodes[i].norm();
        if (r < r_lo || r > r_hi) continue;
        const int b = std::min(kBins - 1, int((r - r_lo) / (r_hi - r_lo) * kBins));
        sum[b] += std::abs(nodal[Eigen::Index(i)]);
        cnt[b]++;
    }
    std::vector<std::pair<double, double>> pts;
    for (int b = 0; b < kBins; ++b) {
        if (cnt[b] == 0) continue;
        const double avg = sum[b] / cnt[b];
        if (avg <= 0) continue;
        const double r = r_lo + (b + 0.5) * (r_hi - r_lo) / kBins;
        pts.emplace_back(r, std::log(avg));
    }
    if (pts.size() < 4) throw std::invalid_argument("insufficient annulus samples for decay fit");
    const RegressionResult line = fit_line(pts);
    fit.applicable = true;
    fit.rate = -line.slope;
    fit.bins_used = int(pts.size());
    return fit;
}

std::vector<SourceRow> run_source_problem(
    const SweepConfig& cfg, const std::function<double(const Eigen::Vector2d&)>& f) {
    cfg.validate();
    std::vector<SourceRow> rows;
    for (double delta : cfg.deltas) {
        Mesh mesh = build_sweep_mesh(cfg, delta);
        AssembledPencil sign_pencil = assemble(mesh, MaterialPair(cfg.sigma_plus, cfg.sigma_minus));
        AssembledPencil limit_pencil = assemble_uniform(mesh, cfg.sigma_plus);
        AssembledPencil h1_pencil = assemble_uniform(mesh, 1.0);

        const DofMap& dofmap = sign_pencil.dofmap;
        Eigen::VectorXd load_nodal(dofmap.n_dof());
        for (int d = 0; d < dofmap.n_dof(); ++d)
            load_nodal[d] = f(mesh.nodes[dofmap.dof_to_node[d]]);
        const Eigen::VectorXd rhs = sign_pencil.M.multiply(load_nodal);

        IndefiniteFactorization kf(sign_pencil.K);
        const Eigen::VectorXd u = kf.solve(rhs);
        IndefiniteFactorization kf0(limit_pencil.K);
        const Eigen::VectorXd v = kf0.solve(rhs);

        const Eigen::VectorXd e = u - v;
        SourceRow row;
        row.delta = delta;
        row.err_l2 = std::sqrt(std::max(0.0, sign_pencil.M.quad_form(e)));
        row.err_h1 = std::sqrt(std::max(0.0, h1_pencil.K.quad_form(e)));
        rows.push_back(row);
    }
    return rows;
}

double spectral_inverse_gap(std::vector<double> a, std::vector<double> b, int k) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty spectrum list");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    auto prep = [&](std::vector<double>& v) {
        for (double x : v)
            if (x == 0) throw std::invalid_argument("zero eigenvalue has no inverse");
        std::sort(v.begin(), v.end(),
                  [](double x, double y) { return std::abs(x) < std::abs(y); });
        if (int(v.size()) > k) v.resize(k);
    };
    prep(a);
    prep(b);
    auto directed = [](const std::vector<double>& from, const std::vector<double>& to) {
        double worst = 0;
        for (double lam : from) {
            double best = std::numeric_limits<double>::infinity();
            for (double mu : to) best = std::min(best, std::abs(1.0 / lam - 1.0 / mu));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace signspec
