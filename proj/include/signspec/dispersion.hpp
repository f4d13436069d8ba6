#pragma once

#include <vector>

namespace signspec {

enum class DispersionKind { FarField, NearField, FullProblem };

// Radial spectral problems on concentric-disk geometries, solved by ODE
// shooting. FarField: Dirichlet Laplacian (weight sigma_plus) on the unit
// disk. NearField: whole-plane transmission problem with a circular inclusion
// of radius inclusion_radius, negative spectrum only. FullProblem: unit disk
// with a concentric circular inclusion of radius delta*inclusion_radius.
struct DispersionProblem {
    DispersionKind kind = DispersionKind::FarField;
    double sigma_plus = 1.0;
    double sigma_minus = -1.0;     // NearField / FullProblem
    double inclusion_radius = 0.25;  // a_c, NearField / FullProblem
    double delta = 0.5;              // FullProblem only
    int angular_mode = 0;
    void validate() const;
};

// Boundary/matching functional whose zeros (in the spectral parameter) are
// the eigenvalues of the given mode: u(1) for the Dirichlet kinds, the
// interface Wronskian mismatch for NearField.
double radial_shoot(const DispersionProblem& problem, double spectral_param);

struct OracleRoot {
    double value = 0;
    int angular_mode = 0;
    int index = 0;  // 1-based position within its mode
    int multiplicity = 1;
    double bracket_width = 0;
};

// First `count` (with multiplicity) Dirichlet eigenvalues of -sigma_plus*Lap
// on the unit disk, ascending; distinct values listed once, multiplicity 2
// for modes m >= 1.
std::vector<OracleRoot> farfield_disk_eigenvalues(double sigma_plus, int count);

// Negative eigenvalues of the whole-plane transmission operator, closest to
// zero first (descending value).
std::vector<OracleRoot> nearfield_circle_eigenvalues(double sigma_plus, double sigma_minus,
                                                     double a_c, int count);

struct FullSpectrum {
    std::vector<OracleRoot> positive;  // ascending
    std::vector<OracleRoot> negative;  // closest to zero first
};

FullSpectrum fullproblem_disk_eigenvalues(double sigma_plus, double sigma_minus, double a_c,
                                          double delta, int count_pos, int count_neg);

}  // namespace signspec
