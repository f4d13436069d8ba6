#include "signspec/contrast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace signspec {

CriticalSet critical_contrasts(double a, double b, int k_max) {
    if (a <= 0 || b <= 0) throw std::invalid_argument("semi-axes must be positive");
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");

    CriticalSet set;
    set.a = a;
    set.b = b;
    set.k_max = k_max;
    if (a == b) return set;  // degenerate: only the accumulation point -1

    // eta_k = (d^k + s^k)/(d^k - s^k), d = |a-b| < s = a+b. The direct ratio
    // keeps low-order values exact (eta_1 = -2 for a = 2b); once the powers
    // leave the normal range switch to the t = (d/s)^k form, which tends to
    // the accumulation point -1 gracefully.
    const double d = std::abs(a - b), s = a + b;
    const double q = d / s;
    double dk = 1.0, sk = 1.0;
    set.eta.reserve(k_max);
    set.inv_eta.reserve(k_max);
    for (int k = 1; k <= k_max; ++k) {
        dk *= d;
        sk *= s;
        double eta;
        if (std::isfinite(sk) && sk >= std::numeric_limits<double>::min()) {
            eta = (dk + sk) / (dk - sk);
        } else {
            const double t = std::pow(q, k);
            eta = (t + 1.0) / (t - 1.0);
        }
        set.eta.push_back(eta);
        set.inv_eta.push_back(1.0 / eta);
    }
    return set;
}

double CriticalSet::distance(double kappa) const {
    double d = std::abs(kappa - (-1.0));  // accumulation point, always critical
    for (double v : eta) d = std::min(d, std::abs(kappa - v));
    for (double v : inv_eta) d = std::min(d, std::abs(kappa - v));
    return d;
}

std::string AdmissibilityReport::describe() const {
    switch (verdict) {
        case ContrastVerdict::Admissible: return "admissible";
        case ContrastVerdict::NearCritical: return "near_critical";
        case ContrastVerdict::Critical: return "critical";
    }
    return "?";
}

AdmissibilityReport check_admissible(double kappa, double a, double b, double tolerance) {
    if (kappa >= 0) throw std::invalid_argument("contrast must be negative");
    if (tolerance <= 0) throw std::invalid_argument("tolerance must be positive");

    const CriticalSet set = critical_contrasts(a, b);
    AdmissibilityReport rep;
    rep.distance = set.distance(kappa);
    const double eps = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(kappa));
    if (rep.distance <= eps) rep.verdict = ContrastVerdict::Critical;
    else if (rep.distance < tolerance) rep.verdict = ContrastVerdict::NearCritical;
    else rep.verdict = ContrastVerdict::Admissible;
    return rep;
}

}  // namespace signspec
