#include "signspec/ldlt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace signspec {

namespace {

// Full (both triangles) adjacency from the upper-triangle CSR pattern.
std::vector<std::vector<int>> adjacency(const SparseSym& a) {
    std::vector<std::vector<int>> adj(a.n);
    for (int i = 0; i < a.n; ++i) {
        for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const int j = a.col[k];
            if (j == i) continue;
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
}

int bfs_far_node(const std::vector<std::vector<int>>& adj, int start, std::vector<int>& level) {
    level.assign(adj.size(), -1);
    std::queue<int> q;
    q.push(start);
    level[start] = 0;
    int last = start;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        last = u;
        for (int v : adj[u])
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            }
    }
    return last;
}

}  // namespace

std::vector<int> reverse_cuthill_mckee(const SparseSym& a) {
    const auto adj = adjacency(a);
    const int n = a.n;
    std::vector<int> order;
    order.reserve(n);
    std::vector<char> visited(n, 0);
    std::vector<int> level;

    for (int seed = 0; seed < n; ++seed) {
        if (visited[seed]) continue;
        // Pseudo-peripheral start: two BFS passes.
        int s = bfs_far_node(adj, seed, level);
        s = bfs_far_node(adj, s, level);
        if (visited[s]) s = seed;

        std::queue<int> q;
        q.push(s);
        visited[s] = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            order.push_back(u);
            std::vector<int> nb;
            for (int v : adj[u])
                if (!visited[v]) nb.push_back(v);
            std::sort(nb.begin(), nb.end(),
                      [&](int x, int y) { return adj[x].size() < adj[y].size(); });
            for (int v : nb) {
                visited[v] = 1;
                q.push(v);
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

IndefiniteFactorization::IndefiniteFactorization(const SparseSym& K, const SparseSym& M,
                                                 double shift)
    : n_(K.n), shift_(shift) {
    if (M.n != 0 && M.n != K.n) throw std::invalid_argument("pencil dimension mismatch");

    order_ = reverse_cuthill_mckee(K);
    rank_.resize(n_);
    for (int i = 0; i < n_; ++i) rank_[order_[i]] = i;

    // Profile start per permuted row, padded by one column so an adjacent
    // 2x2 pivot never produces fill outside the stored profile.
    first_col_.assign(n_, std::numeric_limits<int>::max());
    auto scan_pattern = [&](const SparseSym& s) {
        for (int i = 0; i < s.n; ++i)
            for (int k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
                const int pi = rank_[i], pj = rank_[s.col[k]];
                const int r = std::max(pi, pj), c = std::min(pi, pj);
                first_col_[r] = std::min(first_col_[r], c);
            }
    };
    scan_pattern(K);
    if (M.n) scan_pattern(M);
    for (int i = 0; i < n_; ++i) first_col_[i] = std::max(0, std::min(first_col_[i], i) - 1);
    if (n_ > 0) first_col_[0] = 0;

    row_start_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) row_start_[i + 1] = row_start_[i] + (i - first_col_[i]);
    lo_.assign(row_start_[n_], 0.0);
    y_.assign(row_start_[n_], 0.0);
    d_.assign(n_, 0.0);
    e_.assign(n_, 0.0);
    block_start_.resize(n_);
    for (int i = 0; i < n_; ++i) block_start_[i] = i;

    std::vector<double> diag(n_, 0.0);
    auto scatter = [&](const SparseSym& s, double factor) {
        for (int i = 0; i < s.n; ++i)
            for (int k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
                const int pi = rank_[i], pj = rank_[s.col[k]];
                const int r = std::max(pi, pj), c = std::min(pi, pj);
                if (r == c) diag[r] += factor * s.val[k];
                else lo_[row_start_[r] + (c - first_col_[r])] += factor * s.val[k];
            }
    };
    scatter(K, 1.0);
    if (M.n) scatter(M, -shift);

    factorize(diag);
}

void IndefiniteFactorization::factorize(const std::vector<double>& diag_a) {
    double scale = 0;
    for (double v : diag_a) scale = std::max(scale, std::abs(v));
    if (scale == 0) scale = 1;
    const double piv_tol = 1e-10 * scale;

    int pending = -1;  // row whose 1x1 pivot collapsed, awaiting its pair row
    for (int i = 0; i < n_; ++i) {
        const int fci = first_col_[i];
        double* wi = lo_.data() + row_start_[i] - fci;  // row i, indexed by column
        double* yi = y_.data() + row_start_[i] - fci;

        // Left-to-right reduction; L and Y entries finalize as we go.
        for (int c = fci; c < i; ++c) {
            const bool is_pending = (c == pending);
            const bool pair_first = !is_pending && c + 1 < i && block_start_[c + 1] == c;
            const bool pair_second = block_start_[c] == c - 1;
            if (pair_second) continue;  // finalized together with its partner

            const int dot_end = c;  // pair partners exclude each other from dots
            auto reduce = [&](int col) {
                const double* lc = lo_.data() + row_start_[col] - first_col_[col];
                const int lo = std::max(fci, first_col_[col]);
                double s = 0;
                for (int k = lo; k < dot_end; ++k) s += yi[k] * lc[k];
                return wi[col] - s;
            };

            if (is_pending) {
                wi[c] = reduce(c);  // raw coupling; consumed by the block below
            } else if (pair_first) {
                const double w1 = reduce(c), w2 = reduce(c + 1);
                const double det = d_[c] * d_[c + 1] - e_[c] * e_[c];
                yi[c] = w1;
                yi[c + 1] = w2;
                wi[c] = (w1 * d_[c + 1] - w2 * e_[c]) / det;
                wi[c + 1] = (w2 * d_[c] - w1 * e_[c]) / det;
            } else {
                const double w = reduce(c);
                yi[c] = w;
                wi[c] = w / d_[c];
            }
        }

        double dii = diag_a[i];
        for (int c = fci; c < i; ++c) {
            if (c == pending) continue;  // goes into the 2x2 block instead
            dii -= yi[c] * wi[c];
        }

        if (pending >= 0) {
            const int r = pending;  // always i-1
            const double e = wi[r];
            const double det = d_[r] * dii - e * e;
            if (std::abs(det) <= piv_tol * piv_tol) throw ZeroPivotError(r);
            e_[r] = e;
            d_[i] = dii;
            block_start_[i] = r;
            yi[r] = 0.0;
            wi[r] = 0.0;  // within-block L is the identity
            pending = -1;
        } else if (std::abs(dii) > piv_tol) {
            d_[i] = dii;
        } else if (i + 1 < n_) {
            d_[i] = dii;
            pending = i;
        } else {
            throw ZeroPivotError(i);
        }
    }

    inertia_ = Inertia{};
    for (int i = 0; i < n_;) {
        if (i + 1 < n_ && block_start_[i + 1] == i) {
            const double det = d_[i] * d_[i + 1] - e_[i] * e_[i];
            if (det < 0) {
                inertia_.pos++;
                inertia_.neg++;
            } else {
                (d_[i] + d_[i + 1] > 0 ? inertia_.pos : inertia_.neg) += 2;
            }
            i += 2;
        } else {
            (d_[i] > 0 ? inertia_.pos : inertia_.neg)++;
            i += 1;
        }
    }
}

Eigen::VectorXd IndefiniteFactorization::solve(const Eigen::Ref<const Eigen::VectorXd>& b) const {
    if (b.size() != n_) throw std::invalid_argument("solve: dimension mismatch");
    Eigen::VectorXd z(n_);
    for (int i = 0; i < n_; ++i) z[i] = b[order_[i]];

    for (int i = 0; i < n_; ++i) {
        const int fci = first_col_[i];
        const double* li = lo_.data() + row_start_[i] - fci;
        double s = 0;
        for (int k = fci; k < i; ++k) s += li[k] * z[k];
        z[i] -= s;
    }
    for (int i = 0; i < n_;) {
        if (i + 1 < n_ && block_start_[i + 1] == i) {
            const double det = d_[i] * d_[i + 1] - e_[i] * e_[i];
            const double z1 = z[i], z2 = z[i + 1];
            z[i] = (d_[i + 1] * z1 - e_[i] * z2) / det;
            z[i + 1] = (d_[i] * z2 - e_[i] * z1) / det;
            i += 2;
        } else {
            z[i] /= d_[i];
            i += 1;
        }
    }
    for (int i = n_ - 1; i >= 0; --i) {
        const int fci = first_col_[i];
        const double* li = lo_.data() + row_start_[i] - fci;
        for (int k = fci; k < i; ++k) z[k] -= li[k] * z[i];
    }

    Eigen::VectorXd x(n_);
    for (int i = 0; i < n_; ++i) x[order_[i]] = z[i];
    return x;
}

double IndefiniteFactorization::reconstruction_error(const SparseSym& K,
                                                     const SparseSym& M) const {
    auto l_at = [&](int i, int j) -> double {
        if (i == j) return 1.0;
        if (j < first_col_[i] || j > i) return 0.0;
        return lo_[row_start_[i] + (j - first_col_[i])];
    };
    auto ld_at = [&](int i, int j) -> double {  // (L*D)(i,j) for j <= i
        if (i == j) return d_[i];
        double v = (j < first_col_[i]) ? 0.0 : y_[row_start_[i] + (j - first_col_[i])];
        if (j == i - 1 && block_start_[i] == j) v += e_[j];  // 2x2 coupling
        return v;
    };
    auto reconstruct = [&](int r, int c) {  // r >= c, permuted indices
        double s = ld_at(r, c);
        const int lo = std::max(first_col_[r], c > 0 ? first_col_[c] : 0);
        for (int k = lo; k < c; ++k) s += ld_at(r, k) * l_at(c, k);
        return s;
    };

    double max_a = 0, max_err = 0;
    for (int i = 0; i < K.n; ++i)
        for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
            double a = K.val[k];
            if (M.n) {
                for (int km = M.row_ptr[i]; km < M.row_ptr[i + 1]; ++km)
                    if (M.col[km] == K.col[k]) {
                        a -= shift_ * M.val[km];
                        break;
                    }
            }
            const int pi = rank_[i], pj = rank_[K.col[k]];
            const double rec = reconstruct(std::max(pi, pj), std::min(pi, pj));
            max_a = std::max(max_a, std::abs(a));
            max_err = std::max(max_err, std::abs(rec - a));
        }
    return max_err / std::max(max_a, 1e-300);
}

int count_below(const AssembledPencil& pencil, double sigma) {
    return IndefiniteFactorization(pencil.K, pencil.M, sigma).inertia().neg;
}

}  // namespace signspec
