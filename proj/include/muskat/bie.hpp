#pragma once

#include <optional>
#include <utility>

#include "muskat/kernels.hpp"
#include "muskat/state.hpp"

namespace muskat {

/// Thrown when the density system cannot be solved reliably: the
/// factorization failed or the condition estimate exceeds kCondMax. Carries
/// the contraction-radius diagnostic of the mixed-sign regime when available.
class InvertibilityFailure : public std::runtime_error {
public:
    InvertibilityFailure(const std::string& msg, double cond, std::optional<double> radius)
        : std::runtime_error(msg), cond_estimate(cond), neumann_radius(radius) {}
    double cond_estimate;
    std::optional<double> neumann_radius;
};

/// Condition-estimate ceiling beyond which a solve is reported as failed.
inline constexpr double kCondMax = 1e12;

enum class BlockWhich { CalA, CalB };

/// Dense 2x2-block quadrature matrix of the normal (CalA) or tangential
/// (CalB) trace operator, rows generated by KernelRows so that matvec agrees
/// with the operator applies to rounding.
struct DiscreteBlockOperator {
    BlockWhich which = BlockWhich::CalA;
    int n = 0;
    GridPtr grid;
    std::vector<double> b11, b12, b21, b22;  // row-major N x N

    /// (out1, out2) = block * (in1, in2)
    void matvec(const double* in1, const double* in2, double* out1, double* out2) const;
    std::pair<Profile, Profile> apply(const Profile& w1, const Profile& w2) const;
};

DiscreteBlockOperator assemble(BlockWhich which, const InterfaceState& X);

/// Diagnostics of one density solve.
struct SolveInfo {
    double residual_inf = 0.0;      // ||(I - A_mu CalA) w - Theta X'||_inf via operator applies
    double rhs_inf = 0.0;           // ||Theta X'||_inf
    double cond_estimate = 0.0;     // 1-norm condition estimate of the system matrix
    double coercivity_margin = 0.0; // m(A_mu): logged for the viscosity-ordered regime
    int refinement_steps = 0;
};

/// Solves (I - A_mu CalA(X)) w = Theta X' by dense LU factorization.
/// Residual contract: residual_inf <= 1e-10 * rhs_inf (iterative refinement
/// is applied when the first solve misses it). Throws InvertibilityFailure
/// when the factorization breaks down or the condition estimate exceeds
/// kCondMax.
VorticityDensity solve_omega(const InterfaceState& X, SolveInfo* info = nullptr);

/// Interface velocity Phi(X) = CalB(X)[w] with w from solve_omega. Optionally
/// returns the density and solve diagnostics.
std::pair<Profile, Profile> compute_phi(const InterfaceState& X,
                                        VorticityDensity* omega_out = nullptr,
                                        SolveInfo* info = nullptr);

/// Power-iteration estimate of the spectral radius of the discretized
/// contraction T_A(X) = a1 a2 (1 - a1 A(f))^{-1} S(X) (1 - a2 A(h))^{-1} S'(X).
double neumann_radius(const InterfaceState& X, double a1, double a2, int iters = 50,
                      double tol = 1e-6);

/// Pointwise stability indicators R_i = theta_i + a_mu^i Phi_i(X); the state
/// is stable when both stay negative everywhere.
std::pair<Profile, Profile> rayleigh_taylor(const InterfaceState& X);
std::pair<Profile, Profile> rayleigh_taylor_from_phi(const InterfaceState& X, const Profile& phi1,
                                                     const Profile& phi2);

/// 1-norm condition estimate of lambda*I - CalA(X) (resolvent diagnostic).
double resolvent_condition(const InterfaceState& X, double lambda);

}  // namespace muskat
