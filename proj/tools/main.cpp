#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "signspec/assembly.hpp"
#include "signspec/contrast.hpp"
#include "signspec/dispersion.hpp"
#include "signspec/eigensolver.hpp"
#include "signspec/experiments.hpp"
#include "signspec/io.hpp"
#include "signspec/ldlt.hpp"
#include "signspec/mesh.hpp"

namespace {

using namespace signspec;

std::string default_output_root() {
    if (const char* env = std::getenv("SIGNSPEC_OUTPUT_ROOT")) return env;
    return "out";
}

// Contrast gate: refuses critical contrasts, warns near-critical ones.
void gate_contrast(const RunConfig& cfg) {
    const double kappa = cfg.sigma_minus / cfg.sigma_plus;
    const auto rep = check_admissible(kappa, cfg.a, cfg.b, 0.05);
    if (rep.verdict == ContrastVerdict::Critical)
        throw std::invalid_argument("contrast " + format_shortest(kappa) +
                                    " lies in the critical set (kappa = -1 and the eta_k ladder "
                                    "are excluded)");
    if (rep.verdict == ContrastVerdict::NearCritical)
        std::cerr << "warning: contrast " << format_shortest(kappa)
                  << " is near-critical (distance " << format_shortest(rep.distance) << ")\n";
}

struct Emitter {
    std::string dir;
    std::vector<std::string> files;
    explicit Emitter(std::string d) : dir(std::move(d)) {
        std::filesystem::create_directories(dir);
    }
    std::ofstream open(const std::string& name) {
        files.push_back(name);
        std::ofstream os(dir + "/" + name);
        if (!os) throw std::runtime_error("cannot open " + dir + "/" + name);
        return os;
    }
    void finish(const RunConfig& cfg) { write_run_manifest(dir, cfg.to_json(), files); }
};

SweepConfig to_sweep_config(const RunConfig& cfg) {
    SweepConfig s;
    s.deltas = cfg.deltas;
    s.a = cfg.a;
    s.b = cfg.b;
    s.sigma_plus = cfg.sigma_plus;
    s.sigma_minus = cfg.sigma_minus;
    s.k_pos = cfg.k_pos;
    s.k_neg = cfg.k_neg;
    s.mesh = cfg.mesh;
    s.refinements = cfg.refinements;
    s.tol = cfg.tol;
    s.seed = cfg.seed;
    return s;
}

EigenResult solve_config(const RunConfig& cfg, double delta, Mesh* mesh_out = nullptr,
                         AssembledPencil* pencil_out = nullptr) {
    InclusionGeometry geom{cfg.a, cfg.b, delta};
    Mesh mesh = build_disk_ellipse_mesh(geom, adapt_mesh_params(cfg.mesh, geom));
    for (int r = 0; r < cfg.refinements; ++r) mesh = uniform_refine(mesh, geom);
    AssembledPencil pencil = assemble(mesh, MaterialPair(cfg.sigma_plus, cfg.sigma_minus));
    LanczosConfig lcfg;
    lcfg.n_positive = cfg.k_pos;
    lcfg.n_negative = cfg.k_neg;
    lcfg.tol = cfg.tol;
    lcfg.seed = cfg.seed;
    lcfg.max_subspace = cfg.krylov_dim;
    EigenResult res = solve_smallest_modulus(pencil, lcfg);
    if (mesh_out) *mesh_out = std::move(mesh);
    if (pencil_out) *pencil_out = std::move(pencil);
    return res;
}

void emit_oracle_csv(std::ostream& os, const std::string& kind,
                     const std::vector<OracleRoot>& roots) {
    for (const auto& r : roots)
        os << csv_line({kind, std::to_string(r.angular_mode), std::to_string(r.index),
                        format_shortest(r.value), std::to_string(r.multiplicity),
                        format_shortest(r.bracket_width)});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sign-changing transmission eigenproblem toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0x5157ab1eu;
    double tol = 1e-8;
    int threads = 1;
    bool seed_set = false, tol_set = false;
    app.add_flag_callback("--version", [] {
        std::cout << "signspec 1.0\n";
        std::exit(0);
    });
    app.add_option("--seed", seed, "random seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--tol", tol, "solver tolerance override")->each([&](const std::string&) {
        tol_set = true;
    });
    app.add_option("--threads", threads, "sweep parallelism bound")->check(CLI::PositiveNumber);

    std::string config_path, out_dir = default_output_root();
    double a = 0.5, b = 0.25, delta = 0.5, sigma_plus = 1.0, sigma_minus = -2.5;
    int refinements = 1;

    auto add_common = [&](CLI::App* cmd, bool with_config = true) {
        if (with_config) cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--a", a, "ellipse semi-axis a");
        cmd->add_option("--b", b, "ellipse semi-axis b");
        cmd->add_option("--delta", delta, "inclusion scale delta");
        cmd->add_option("--sigma-plus", sigma_plus, "exterior coefficient");
        cmd->add_option("--sigma-minus", sigma_minus, "inclusion coefficient");
        cmd->add_option("--refine", refinements, "uniform refinement levels")
            ->check(CLI::NonNegativeNumber);
    };

    auto load_config = [&](CLI::App* cmd) {
        RunConfig cfg;
        if (!config_path.empty()) cfg = RunConfig::load(config_path);
        else {
            cfg.a = a;
            cfg.b = b;
            cfg.deltas = {delta};
            cfg.sigma_plus = sigma_plus;
            cfg.sigma_minus = sigma_minus;
        }
        if (cmd->count("--a")) cfg.a = a;
        if (cmd->count("--b")) cfg.b = b;
        if (cmd->count("--delta")) cfg.deltas = {delta};
        if (cmd->count("--sigma-plus")) cfg.sigma_plus = sigma_plus;
        if (cmd->count("--sigma-minus")) cfg.sigma_minus = sigma_minus;
        if (cmd->count("--refine")) cfg.refinements = refinements;
        if (cmd->count("--out")) cfg.output_dir = out_dir;
        else if (config_path.empty()) cfg.output_dir = out_dir;
        if (seed_set) cfg.seed = seed;
        if (tol_set) cfg.tol = tol;
        cfg.validate();
        return cfg;
    };

    // mesh
    auto* cmd_mesh = app.add_subcommand("mesh", "generate and export a mesh");
    std::string mesh_out = "mesh.txt", vtk_out;
    add_common(cmd_mesh, false);
    cmd_mesh->add_option("--mesh-out", mesh_out, "mesh file name");
    cmd_mesh->add_option("--vtk", vtk_out, "also export a VTK file with zero field");

    // solve
    auto* cmd_solve = app.add_subcommand("solve", "single (delta, h) eigenvalue solve");
    int k_pos = 6, k_neg = 3;
    add_common(cmd_solve);
    cmd_solve->add_option("--kpos", k_pos, "positive eigenvalues");
    cmd_solve->add_option("--kneg", k_neg, "negative eigenvalues");

    // h-study
    auto* cmd_h = app.add_subcommand("h-study", "mesh refinement study at fixed delta");
    int levels = 5;
    add_common(cmd_h);
    cmd_h->add_option("--levels", levels, "refinement levels")->check(CLI::PositiveNumber);

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "delta sweep of the spectrum");
    add_common(cmd_sweep);

    // oracle
    auto* cmd_oracle = app.add_subcommand("oracle", "semi-analytic eigenvalue lists");
    std::string kind = "farfield";
    int count = 6, count_neg_oracle = 2;
    double ac = 0.25;
    cmd_oracle->add_option("--kind", kind, "farfield | nearfield | full")
        ->check(CLI::IsMember({"farfield", "nearfield", "full"}));
    cmd_oracle->add_option("--count", count, "eigenvalues to compute");
    cmd_oracle->add_option("--count-neg", count_neg_oracle, "negative count (full kind)");
    cmd_oracle->add_option("--ac", ac, "inclusion radius a_c");
    cmd_oracle->add_option("--delta", delta, "inclusion scale (full kind)");
    cmd_oracle->add_option("--sigma-plus", sigma_plus, "exterior coefficient");
    cmd_oracle->add_option("--sigma-minus", sigma_minus, "inclusion coefficient");

    // critical-set
    auto* cmd_crit = app.add_subcommand("critical-set", "critical contrast table");
    int kmax = 64;
    double crit_a = 0.5, crit_b = 0.25;
    cmd_crit->add_option("--a", crit_a, "semi-axis a")->required();
    cmd_crit->add_option("--b", crit_b, "semi-axis b")->required();
    cmd_crit->add_option("--kmax", kmax, "truncation order");

    // source
    auto* cmd_source = app.add_subcommand("source", "source-problem convergence study");
    add_common(cmd_source);

    // export-eigvec
    auto* cmd_export = app.add_subcommand("export-eigvec", "write an eigenfunction as VTK");
    int eig_index = -1;
    std::string field_out = "eigvec.vtk";
    add_common(cmd_export);
    cmd_export->add_option("--index", eig_index,
                           "signed index: 1,2,... positive branch, -1,-2,... negative");
    cmd_export->add_option("--field-out", field_out, "VTK file name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*cmd_mesh) {
            InclusionGeometry geom{a, b, delta};
            geom.validate();
            MeshParams params;
            Mesh mesh = build_disk_ellipse_mesh(geom, adapt_mesh_params(params, geom));
            const int mesh_levels = cmd_mesh->count("--refine") ? refinements : 0;
            for (int r = 0; r < mesh_levels; ++r) mesh = uniform_refine(mesh, geom);
            check_mesh_invariants(mesh, geom);
            Emitter em(out_dir);
            {
                auto os = em.open(mesh_out);
                write_mesh_ascii(mesh, os);
            }
            if (!vtk_out.empty()) {
                em.files.push_back(vtk_out);
                write_vtk_field(mesh, Eigen::VectorXd::Zero(mesh.node_count()), "zero",
                                out_dir + "/" + vtk_out);
            }
            const QualityReport q = mesh_quality(mesh);
            std::cout << "nodes " << mesh.node_count() << " triangles " << mesh.triangle_count()
                      << " h_max " << format_shortest(q.h_max) << " min_angle_deg "
                      << format_shortest(q.min_angle_deg) << "\n";
        } else if (*cmd_solve) {
            RunConfig cfg = load_config(cmd_solve);
            if (cmd_solve->count("--kpos")) cfg.k_pos = k_pos;
            if (cmd_solve->count("--kneg")) cfg.k_neg = k_neg;
            gate_contrast(cfg);
            EigenResult res = solve_config(cfg, cfg.deltas.front());
            Emitter em(cfg.output_dir);
            auto os = em.open("eigenvalues.csv");
            os << csv_line({"n", "lambda", "residual"});
            for (int i = 0; i < int(res.positive.size()); ++i)
                os << csv_line({std::to_string(i + 1), format_shortest(res.positive[i].value),
                                format_shortest(res.positive[i].residual)});
            for (int i = 0; i < int(res.negative.size()); ++i)
                os << csv_line({std::to_string(-(i + 1)), format_shortest(res.negative[i].value),
                                format_shortest(res.negative[i].residual)});
            em.finish(cfg);
        } else if (*cmd_h) {
            RunConfig cfg = load_config(cmd_h);
            gate_contrast(cfg);
            InclusionGeometry geom{cfg.a, cfg.b, cfg.deltas.front()};
            auto table = run_h_study(geom, MaterialPair(cfg.sigma_plus, cfg.sigma_minus),
                                     adapt_mesh_params(cfg.mesh, geom), levels, cfg.tol,
                                     cfg.seed);
            Emitter em(cfg.output_dir);
            auto os = em.open("h_study.csv");
            os << csv_line({"level", "h_max", "lambda_pos_1", "lambda_neg_1", "order_pos",
                            "order_neg"});
            for (const auto& r : table)
                os << csv_line({std::to_string(r.level), format_shortest(r.h_max),
                                format_shortest(r.lambda_pos_1), format_shortest(r.lambda_neg_1),
                                std::isnan(r.order_pos) ? "" : format_shortest(r.order_pos),
                                std::isnan(r.order_neg) ? "" : format_shortest(r.order_neg)});
            em.finish(cfg);
        } else if (*cmd_sweep) {
            RunConfig cfg = load_config(cmd_sweep);
            if (cfg.deltas.size() < 2) cfg.deltas = SweepConfig{}.deltas;
            gate_contrast(cfg);
            SweepReport report = run_delta_sweep(to_sweep_config(cfg));
            Emitter em(cfg.output_dir);
            {
                auto os = em.open("sweep.csv");
                os << csv_line({"delta", "h_max", "n", "lambda", "scaled_lambda", "residual",
                                "loc_fraction"});
                for (const auto& r : report.rows) {
                    if (!r.ok) {
                        os << csv_line({format_shortest(r.delta), format_shortest(r.h_max),
                                        "failed", "", "", "", ""});
                        continue;
                    }
                    os << csv_line({format_shortest(r.delta), format_shortest(r.h_max),
                                    std::to_string(r.n), format_shortest(r.lambda),
                                    format_shortest(r.scaled_lambda), format_shortest(r.residual),
                                    format_shortest(r.loc_fraction)});
                }
            }
            if (!report.negative_points.empty()) {
                PlotSeries s;
                s.label = "|lambda_-1| vs 1/delta";
                s.points = report.negative_points;
                s.annotate_slope = true;
                em.files.push_back("negative_branch.svg");
                write_loglog_svg({s}, "negative branch blow-up",
                                 cfg.output_dir + "/negative_branch.svg");
            }
            em.finish(cfg);
            if (report.negative_fit.points >= 3)
                std::cout << "negative-branch slope " << format_shortest(report.negative_fit.slope)
                          << " r2 " << format_shortest(report.negative_fit.r_squared) << "\n";
        } else if (*cmd_oracle) {
            std::cout << csv_line({"kind", "m", "index", "value", "multiplicity",
                                   "bracket_width"});
            if (kind == "farfield") {
                emit_oracle_csv(std::cout, kind, farfield_disk_eigenvalues(sigma_plus, count));
            } else if (kind == "nearfield") {
                emit_oracle_csv(std::cout, kind,
                                nearfield_circle_eigenvalues(sigma_plus, sigma_minus, ac, count));
            } else {
                FullSpectrum full = fullproblem_disk_eigenvalues(sigma_plus, sigma_minus, ac,
                                                                 delta, count, count_neg_oracle);
                emit_oracle_csv(std::cout, "full_pos", full.positive);
                emit_oracle_csv(std::cout, "full_neg", full.negative);
            }
        } else if (*cmd_crit) {
            const CriticalSet set = critical_contrasts(crit_a, crit_b, kmax);
            std::cout << csv_line({"k", "eta_k", "inv_eta_k"});
            for (int k = 0; k < int(set.eta.size()); ++k)
                std::cout << csv_line({std::to_string(k + 1), format_shortest(set.eta[k]),
                                       format_shortest(set.inv_eta[k])});
        } else if (*cmd_source) {
            RunConfig cfg = load_config(cmd_source);
            if (cfg.deltas.size() < 2) cfg.deltas = SweepConfig{}.deltas;
            gate_contrast(cfg);
            auto rows = run_source_problem(to_sweep_config(cfg));
            Emitter em(cfg.output_dir);
            auto os = em.open("source.csv");
            os << csv_line({"delta", "err_l2", "err_h1"});
            for (const auto& r : rows)
                os << csv_line({format_shortest(r.delta), format_shortest(r.err_l2),
                                format_shortest(r.err_h1)});
            em.finish(cfg);
        } else if (*cmd_export) {
            RunConfig cfg = load_config(cmd_export);
            gate_contrast(cfg);
            if (eig_index == 0) throw std::invalid_argument("index 0 does not exist");
            cfg.k_pos = eig_index > 0 ? eig_index : 1;
            cfg.k_neg = eig_index < 0 ? -eig_index : 0;
            Mesh mesh;
            AssembledPencil pencil;
            EigenResult res = solve_config(cfg, cfg.deltas.front(), &mesh, &pencil);
            const EigenPair& pair = eig_index > 0 ? res.positive.at(eig_index - 1)
                                                  : res.negative.at(-eig_index - 1);
            Eigen::VectorXd nodal = Eigen::VectorXd::Zero(mesh.node_count());
            for (int node = 0; node < mesh.node_count(); ++node)
                if (pencil.dofmap.node_to_dof[node] >= 0)
                    nodal[node] = pair.vector[pencil.dofmap.node_to_dof[node]];
            Emitter em(cfg.output_dir);
            em.files.push_back(field_out);
            write_vtk_field(mesh, nodal, "eigenfunction", cfg.output_dir + "/" + field_out);
            em.finish(cfg);
            std::cout << "lambda " << format_shortest(pair.value) << " residual "
                      << format_shortest(pair.residual) << "\n";
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
