#pragma once

#include <complex>
#include <vector>

#include "muskat/bie.hpp"

namespace muskat {

/// Flat-interface growth matrix at wavenumber k: a pure-mode perturbation
/// evolves as d/dt (f_k, h_k) = M(k) (f_k, h_k). Built from the flat-state
/// mode multipliers of the trace operators:
///   A(0) -> 0,  S(0) -> -E,  S'(0) -> E,  B(0) -> -i sign(k),
///   T(0), T'(0) -> -i sign(k) E,   with E = exp(-c_inf |k|).
struct DispersionMatrix {
    double k = 0.0;
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    std::complex<double> lambda1, lambda2;  // eigenvalues of m

    double max_real_part() const { return std::max(lambda1.real(), lambda2.real()); }
};

DispersionMatrix dispersion_matrix(double k, const FluidParams& params);

/// Leading-order frozen coefficients (alpha, beta) of the linearized motion of
/// one interface at node j0: alpha multiplies the half-derivative |D|, beta
/// the transport derivative d/dx. The first interface uses the formulas as
/// derived; the second is produced by the mirror substitution
/// f <-> h, c_inf <-> -c_inf, (theta1, a_mu1) <-> (theta2, a_mu2) and is
/// flagged derived_by_analogy.
struct PrincipalSymbol {
    double alpha = 0.0;
    double beta = 0.0;
    bool derived_by_analogy = false;
};

PrincipalSymbol principal_symbol(const InterfaceState& X, const VorticityDensity& omega, int j0,
                                 bool second_interface = false);

/// One row of a flat-state stability scan.
struct RtScanRow {
    FluidParams params;
    bool rt_stable = false;     // both theta_i < 0
    double min_spectral_gap = 0.0;  // min over the k grid of -max Re lambda_i(k)
};

std::vector<RtScanRow> rt_region_scan(const std::vector<FluidParams>& params,
                                      const std::vector<double>& k_grid);

}  // namespace muskat
