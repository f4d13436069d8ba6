#include "signspec/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Eigenvalues>

namespace signspec {

namespace {

double diag_scale(const SparseSym& s) {
    double m = 0;
    for (int i = 0; i < s.n; ++i)
        for (int k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k)
            if (s.col[k] == i) m = std::max(m, std::abs(s.val[k]));
    return m > 0 ? m : 1.0;
}

struct RitzCandidate {
    double value;
    double residual;
    Eigen::VectorXd vector;
};

}  // namespace

double residual_distance_bound(const AssembledPencil& pencil, double lambda,
                               const Eigen::Ref<const Eigen::VectorXd>& v) {
    IndefiniteFactorization mfac(pencil.M);
    Eigen::VectorXd r = pencil.K.multiply(v) - lambda * pencil.M.multiply(v);
    const double num = std::sqrt(std::max(0.0, r.dot(mfac.solve(r))));
    const double den = std::sqrt(std::max(0.0, pencil.M.quad_form(v)));
    return num / den;
}

EigenResult solve_smallest_modulus(const AssembledPencil& pencil, const LanczosConfig& cfg) {
    const int n = pencil.K.n;
    if (n == 0) return {};
    if (cfg.n_positive < 0 || cfg.n_negative < 0)
        throw std::invalid_argument("negative eigenvalue count requested");

    IndefiniteFactorization mfac(pencil.M);
    if (mfac.inertia().neg > 0 || mfac.inertia().zero > 0)
        throw std::runtime_error("mass matrix is not positive definite");

    const double scale = diag_scale(pencil.K) / diag_scale(pencil.M);
    const double ladder[] = {0.0, 1e-3 * scale, -1e-3 * scale};

    std::unique_ptr<IndefiniteFactorization> kfac;
    double shift = 0;
    for (double s : ladder) {
        try {
            kfac = std::make_unique<IndefiniteFactorization>(pencil.K, pencil.M, s);
            shift = s;
            break;
        } catch (const ZeroPivotError&) {
            continue;
        }
    }
    if (!kfac) throw std::runtime_error("all trial shifts were singular");

    // Inertia of K (= pencil at shift 0) counts the negative eigenvalues;
    // clamp requests to what the discrete operator actually has.
    const int neg_count = shift == 0.0 ? kfac->inertia().neg
                                       : IndefiniteFactorization(pencil.K).inertia().neg;
    const int want_neg = std::min(cfg.n_negative, neg_count);
    const int want_pos = std::min(cfg.n_positive, n - neg_count);

    EigenResult result;
    result.shift_used = shift;

    int m = cfg.max_subspace > 0 ? cfg.max_subspace
                                 : std::max(3 * (want_pos + want_neg) + 20, 40);
    m = std::min(m, n);

    for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt, m = std::min(n, m + m / 2)) {
        std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ull * attempt);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        Eigen::VectorXd q(n);
        for (int i = 0; i < n; ++i) q[i] = unif(rng);

        Eigen::MatrixXd V(n, m), W(n, m);  // Lanczos basis and M * basis
        Eigen::VectorXd alpha(m), beta(m);
        Eigen::VectorXd w = pencil.M.multiply(q);
        q /= std::sqrt(q.dot(w));
        V.col(0) = q;
        W.col(0) = pencil.M.multiply(q);

        int steps = 0;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd z = kfac->solve(W.col(j));
            alpha[j] = z.dot(W.col(j));
            z -= alpha[j] * V.col(j);
            if (j > 0) z -= beta[j - 1] * V.col(j - 1);
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= j; ++i) z -= (z.dot(W.col(i))) * V.col(i);
            steps = j + 1;
            if (j + 1 == m) break;
            Eigen::VectorXd mz = pencil.M.multiply(z);
            const double b = std::sqrt(std::max(0.0, z.dot(mz)));
            if (b < 1e-13) break;  // invariant subspace found
            beta[j] = b;
            V.col(j + 1) = z / b;
            W.col(j + 1) = mz / b;
        }
        result.iterations += steps;

        Eigen::VectorXd diag = alpha.head(steps);
        Eigen::VectorXd sub = steps > 1 ? beta.head(steps - 1) : Eigen::VectorXd();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub);

        std::vector<RitzCandidate> pos, neg;
        for (int k = 0; k < steps; ++k) {
            const double theta = es.eigenvalues()[k];
            if (std::abs(theta) < 1e-14) continue;
            const double lambda = shift + 1.0 / theta;
            Eigen::VectorXd v = V.leftCols(steps) * es.eigenvectors().col(k);
            v /= std::sqrt(std::max(1e-300, pencil.M.quad_form(v)));
            const Eigen::VectorXd r =
                pencil.K.multiply(v) - lambda * pencil.M.multiply(v);
            const double rho = std::sqrt(std::max(0.0, r.dot(mfac.solve(r))));
            RitzCandidate cand{lambda, rho / std::abs(lambda), std::move(v)};
            (cand.value > 0 ? pos : neg).push_back(std::move(cand));
        }
        std::sort(pos.begin(), pos.end(),
                  [](const auto& a, const auto& b) { return a.value < b.value; });
        std::sort(neg.begin(), neg.end(),
                  [](const auto& a, const auto& b) { return a.value > b.value; });

        auto take = [&](std::vector<RitzCandidate>& src, int want, std::vector<EigenPair>& dst) {
            if ((int)src.size() < want) return false;
            for (int k = 0; k < want; ++k)
                if (src[k].residual > cfg.tol) return false;
            dst.clear();
            for (int k = 0; k < want; ++k)
                dst.push_back({src[k].value, src[k].residual, std::move(src[k].vector)});
            return true;
        };
        std::vector<EigenPair> pos_out, neg_out;
        if (take(pos, want_pos, pos_out) && take(neg, want_neg, neg_out)) {
            result.positive = std::move(pos_out);
            result.negative = std::move(neg_out);
            return result;
        }
        if (m == n && attempt > 0)
            throw std::runtime_error("eigensolver failed to converge at full subspace size");
    }
    throw std::runtime_error("eigensolver exhausted restarts without converging");
}

}  // namespace signspec
