#include "signspec/dispersion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

namespace signspec {

namespace {

using State = std::array<double, 2>;  // (u, u')

// Integrates u'' + u'/r - m^2 u/r^2 + k2 u = 0 from ra to rb (either
// direction), renormalizing the state when it grows past overflow guard
// levels. Positive rescaling preserves the sign of the boundary functional.
void integrate_mode(int m, double k2, double ra, double rb, State& y) {
    namespace ode = boost::numeric::odeint;
    const double m2 = double(m) * m;
    auto sys = [&](const State& u, State& du, double r) {
        du[0] = u[1];
        du[1] = -u[1] / r + (m2 / (r * r) - k2) * u[0];
    };
    auto stepper = ode::make_controlled(1e-12, 1e-11, ode::runge_kutta_cash_karp54<State>());

    const double dir = rb > ra ? 1.0 : -1.0;
    double r = ra;
    double dt = dir * std::min(std::abs(rb - ra), 1e-2 * std::max(ra, 1e-3));
    int guard = 0;
    while (dir * (rb - r) > 1e-15 * std::abs(rb)) {
        if (dir * (r + dt) > dir * rb) dt = rb - r;
        if (stepper.try_step(sys, y, r, dt) == ode::fail) {
            if (++guard > 2000000) throw std::runtime_error("radial integration stalled");
            continue;
        }
        const double mag = std::max(std::abs(y[0]), std::abs(y[1]));
        if (mag > 1e100) {
            y[0] /= mag;
            y[1] /= mag;
        }
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
            throw std::runtime_error("radial integration produced non-finite state");
        if (++guard > 2000000) throw std::runtime_error("radial integration stalled");
    }
}

// Regular solution near r=0: u = r^m (1 - k2 r^2 / (4(m+1))) + O(r^{m+4}).
State regular_start(int m, double k2, double r0) {
    const double c = k2 / (4.0 * (m + 1));
    double rm = std::pow(r0, m);
    if (m > 40 || rm < 1e-280) {
        // Normalized variant for very high modes; positive rescale only.
        return {1.0 - c * r0 * r0, m / r0 * (1.0 - c * r0 * r0) - 2.0 * c * r0};
    }
    const double u = rm * (1.0 - c * r0 * r0);
    const double du = m * std::pow(r0, m - 1) - c * (m + 2) * std::pow(r0, m + 1);
    return {u, du};
}

constexpr double kStartRadius = 1e-6;

}  // namespace

void DispersionProblem::validate() const {
    if (sigma_plus <= 0) throw std::invalid_argument("sigma_plus must be positive");
    if (angular_mode < 0) throw std::invalid_argument("angular_mode must be >= 0");
    if (kind != DispersionKind::FarField) {
        if (sigma_minus >= 0) throw std::invalid_argument("sigma_minus must be negative");
        if (sigma_minus / sigma_plus == -1.0)
            throw std::invalid_argument("contrast -1 is not admissible");
        if (inclusion_radius <= 0) throw std::invalid_argument("inclusion_radius must be > 0");
    }
    if (kind == DispersionKind::NearField && inclusion_radius <= 0)
        throw std::invalid_argument("inclusion_radius must be > 0");
    if (kind == DispersionKind::FullProblem) {
        if (inclusion_radius >= 1) throw std::invalid_argument("inclusion_radius must be < 1");
        if (delta <= 0 || delta * inclusion_radius >= 1)
            throw std::invalid_argument("inclusion must fit inside the unit disk");
    }
}

double radial_shoot(const DispersionProblem& p, double lambda) {
    p.validate();
    const int m = p.angular_mode;

    switch (p.kind) {
        case DispersionKind::FarField: {
            if (lambda <= 0) throw std::invalid_argument("FarField requires a positive parameter");
            const double k2 = lambda / p.sigma_plus;
            State y = regular_start(m, k2, kStartRadius);
            integrate_mode(m, k2, kStartRadius, 1.0, y);
            return y[0];
        }
        case DispersionKind::FullProblem: {
            if (lambda == 0) throw std::invalid_argument("FullProblem requires a nonzero parameter");
            const double ri = p.delta * p.inclusion_radius;
            const double k2_in = lambda / p.sigma_minus;
            State y = regular_start(m, k2_in, kStartRadius);
            integrate_mode(m, k2_in, kStartRadius, ri, y);
            y[1] *= p.sigma_minus / p.sigma_plus;  // [u]=0, [sigma u']=0 at the interface
            integrate_mode(m, lambda / p.sigma_plus, ri, 1.0, y);
            return y[0];
        }
        case DispersionKind::NearField: {
            if (lambda >= 0) throw std::invalid_argument("NearField requires a negative parameter");
            const double a = p.inclusion_radius;
            const double k2_in = lambda / p.sigma_minus;  // > 0: oscillatory inside
            State yin = regular_start(m, k2_in, kStartRadius * a);
            integrate_mode(m, k2_in, kStartRadius * a, a, yin);

            const double k_out = std::sqrt(-lambda / p.sigma_plus);
            const double r_inf = std::max(40.0 / k_out, 2.0 * a);
            // Decaying exterior seed ~ e^{-k r}/sqrt(r); inward integration
            // damps any admixture of the growing solution.
            State yout = {1.0, -k_out - 0.5 / r_inf};
            integrate_mode(m, -k_out * k_out, r_inf, a, yout);

            return p.sigma_minus * yin[1] * yout[0] - p.sigma_plus * yout[1] * yin[0];
        }
    }
    throw std::logic_error("unreachable");
}

namespace {

struct Bracket {
    double lo, hi;
};

// Sign-change scan on a geometric grid over [x_lo, x_hi] (same sign, ordered
// by magnitude); grid density doubles until the root count is stable on two
// successive refinements.
std::vector<Bracket> scan_brackets(const std::function<double(double)>& f, double x_lo,
                                   double x_hi) {
    const double sign = x_lo < 0 ? -1.0 : 1.0;
    const double lo = std::abs(x_lo), hi = std::abs(x_hi);
    if (lo <= 0 || hi <= lo) throw std::invalid_argument("bad bracket scan window");

    std::vector<Bracket> result;
    std::size_t prev = static_cast<std::size_t>(-1);
    int stable = 0;
    for (int n = 64; n <= (1 << 17); n *= 2) {
        std::vector<Bracket> found;
        const double ratio = std::pow(hi / lo, 1.0 / n);
        double x_prev = sign * lo;
        double f_prev = f(x_prev);
        for (int i = 1; i <= n; ++i) {
            const double x = sign * lo * std::pow(ratio, i);
            const double fx = f(x);
            if (f_prev == 0.0) found.push_back({x_prev, x_prev});
            else if (fx != 0.0 && std::signbit(fx) != std::signbit(f_prev))
                found.push_back({x_prev, x});
            x_prev = x;
            f_prev = fx;
        }
        if (found.size() == prev) {
            if (++stable >= 2) return found;
        } else {
            stable = 0;
        }
        prev = found.size();
        result = std::move(found);
    }
    return result;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double* width) {
    double flo = f(lo);
    if (flo == 0.0) {
        if (width) *width = 0;
        return lo;
    }
    while (hi - lo > 1e-12 * std::abs(lo + hi) / 2) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    if (width) *width = hi - lo;
    return 0.5 * (lo + hi);
}

// Roots of f in the window, ascending by magnitude.
std::vector<OracleRoot> mode_roots(const std::function<double(double)>& f, double x_lo,
                                   double x_hi, int m) {
    std::vector<OracleRoot> roots;
    for (const Bracket& br : scan_brackets(f, x_lo, x_hi)) {
        OracleRoot r;
        double a = br.lo, b = br.hi;
        if (a > b) std::swap(a, b);
        r.value = bisect(f, a, b, &r.bracket_width);
        r.angular_mode = m;
        r.multiplicity = m == 0 ? 1 : 2;
        roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end(),
              [](const OracleRoot& x, const OracleRoot& y) {
                  return std::abs(x.value) < std::abs(y.value);
              });
    for (std::size_t i = 0; i < roots.size(); ++i) roots[i].index = int(i) + 1;
    return roots;
}

// Merge per-mode lists by |value| (stable tie-break on mode), keep entries
// until the cumulative multiplicity reaches `count`.
std::vector<OracleRoot> merge_modes(std::vector<std::vector<OracleRoot>> per_mode, int count) {
    std::vector<OracleRoot> all;
    for (auto& v : per_mode) all.insert(all.end(), v.begin(), v.end());
    std::stable_sort(all.begin(), all.end(), [](const OracleRoot& x, const OracleRoot& y) {
        if (std::abs(x.value) != std::abs(y.value)) return std::abs(x.value) < std::abs(y.value);
        return x.angular_mode < y.angular_mode;
    });
    std::vector<OracleRoot> out;
    int mult = 0;
    for (const OracleRoot& r : all) {
        if (mult >= count) break;
        out.push_back(r);
        mult += r.multiplicity;
    }
    return out;
}

}  // namespace

std::vector<OracleRoot> farfield_disk_eigenvalues(double sigma_plus, int count) {
    if (sigma_plus <= 0) throw std::invalid_argument("sigma_plus must be positive");
    if (count < 1) throw std::invalid_argument("count must be >= 1");

    double ceiling = sigma_plus * std::max(40.0, 4.5 * (count + 6));
    for (;;) {
        std::vector<std::vector<OracleRoot>> per_mode;
        int mult = 0;
        for (int m = 0;; ++m) {
            DispersionProblem p;
            p.kind = DispersionKind::FarField;
            p.sigma_plus = sigma_plus;
            p.angular_mode = m;
            auto f = [&](double lam) { return radial_shoot(p, lam); };
            auto roots = mode_roots(f, 0.1 * sigma_plus, ceiling, m);
            if (roots.empty()) break;
            for (const auto& r : roots) mult += r.multiplicity;
            per_mode.push_back(std::move(roots));
        }
        if (mult >= count) return merge_modes(std::move(per_mode), count);
        ceiling *= 1.6;
    }
}

std::vector<OracleRoot> nearfield_circle_eigenvalues(double sigma_plus, double sigma_minus,
                                                     double a_c, int count) {
    if (sigma_plus <= 0 || sigma_minus >= 0) throw std::invalid_argument("invalid signs");
    if (sigma_minus / sigma_plus == -1.0) throw std::invalid_argument("contrast -1 rejected");
    if (a_c <= 0 || count < 1) throw std::invalid_argument("invalid arguments");

    const double scale = sigma_plus / (a_c * a_c);
    double ceiling = 60.0 * scale * std::max(1, count / 4);
    for (;;) {
        std::vector<std::vector<OracleRoot>> per_mode;
        int mult = 0, empty_streak = 0;
        for (int m = 0; empty_streak < 2; ++m) {
            DispersionProblem p;
            p.kind = DispersionKind::NearField;
            p.sigma_plus = sigma_plus;
            p.sigma_minus = sigma_minus;
            p.inclusion_radius = a_c;
            p.angular_mode = m;
            auto f = [&](double mu) { return radial_shoot(p, mu); };
            auto roots = mode_roots(f, -1e-3 * scale, -ceiling, m);
            if (roots.empty()) {
                ++empty_streak;
                continue;
            }
            empty_streak = 0;
            for (const auto& r : roots) mult += r.multiplicity;
            per_mode.push_back(std::move(roots));
        }
        if (mult >= count) return merge_modes(std::move(per_mode), count);
        ceiling *= 2.0;
    }
}

FullSpectrum fullproblem_disk_eigenvalues(double sigma_plus, double sigma_minus, double a_c,
                                          double delta, int count_pos, int count_neg) {
    DispersionProblem base;
    base.kind = DispersionKind::FullProblem;
    base.sigma_plus = sigma_plus;
    base.sigma_minus = sigma_minus;
    base.inclusion_radius = a_c;
    base.delta = delta;
    base.validate();
    if (count_pos < 0 || count_neg < 0) throw std::invalid_argument("negative count");

    FullSpectrum out;
    if (count_pos > 0) {
        double ceiling = sigma_plus * std::max(40.0, 4.5 * (count_pos + 6));
        for (;;) {
            std::vector<std::vector<OracleRoot>> per_mode;
            int mult = 0, empty_streak = 0;
            for (int m = 0; empty_streak < 2; ++m) {
                DispersionProblem p = base;
                p.angular_mode = m;
                auto f = [&](double lam) { return radial_shoot(p, lam); };
                auto roots = mode_roots(f, 0.05 * sigma_plus, ceiling, m);
                if (roots.empty()) {
                    ++empty_streak;
                    continue;
                }
                empty_streak = 0;
                for (const auto& r : roots) mult += r.multiplicity;
                per_mode.push_back(std::move(roots));
            }
            if (mult >= count_pos) {
                out.positive = merge_modes(std::move(per_mode), count_pos);
                break;
            }
            ceiling *= 1.6;
        }
    }
    if (count_neg > 0) {
        const double ri = delta * a_c;
        const double scale = sigma_plus / (ri * ri);
        double ceiling = 60.0 * scale * std::max(1, count_neg / 4);
        for (;;) {
            std::vector<std::vector<OracleRoot>> per_mode;
            int mult = 0, empty_streak = 0;
            for (int m = 0; empty_streak < 2; ++m) {
                DispersionProblem p = base;
                p.angular_mode = m;
                auto f = [&](double lam) { return radial_shoot(p, lam); };
                auto roots = mode_roots(f, -1e-3 * sigma_plus, -ceiling, m);
                if (roots.empty()) {
                    ++empty_streak;
                    continue;
                }
                empty_streak = 0;
                for (const auto& r : roots) mult += r.multiplicity;
                per_mode.push_back(std::move(roots));
            }
            if (mult >= count_neg) {
                out.negative = merge_modes(std::move(per_mode), count_neg);
                break;
            }
            ceiling *= 2.0;
        }
    }
    return out;
}

}  // namespace signspec
