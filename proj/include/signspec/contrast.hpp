#pragma once

#include <string>
#include <vector>

namespace signspec {

// Critical contrast values for an elliptical inclusion with semi-axes a, b:
// eta_k = (|a-b|^k + (a+b)^k) / (|a-b|^k - (a+b)^k) for k = 1..k_max, their
// reciprocals, and the accumulation point -1.
struct CriticalSet {
    double a = 0, b = 0;
    int k_max = 0;
    std::vector<double> eta;      // eta_k, k = 1..k_max (empty when a == b)
    std::vector<double> inv_eta;  // 1/eta_k
    // Distance from kappa to the truncated set plus the accumulation point.
    double distance(double kappa) const;
};

CriticalSet critical_contrasts(double a, double b, int k_max = 64);

enum class ContrastVerdict { Admissible, NearCritical, Critical };

struct AdmissibilityReport {
    ContrastVerdict verdict = ContrastVerdict::Admissible;
    double distance = 0;  // to the critical set
    std::string describe() const;
};

AdmissibilityReport check_admissible(double kappa, double a, double b, double tolerance);

}  // namespace signspec
