#pragma once

#include <stdexcept>
#include <string>

#include "muskat/grid.hpp"

namespace muskat {

/// Thrown when the two interfaces touch or cross (gap <= 0).
class InterfaceCollision : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical constants of the three-fluid column. The stable stratification
/// rho3 > rho2 > rho1 makes both driving coefficients theta1, theta2 negative;
/// |a_mu| < 1 follows from positive viscosities.
struct FluidParams {
    double rho1 = 1.0, rho2 = 2.0, rho3 = 3.0;
    double mu1 = 1.0, mu2 = 1.0, mu3 = 1.0;
    double permeability = 1.0;  // k
    double gravity = 1.0;       // g
    double c_inf = 1.0;         // rest separation of the interfaces

    double theta1() const { return (rho1 - rho2) * gravity * permeability / (mu1 + mu2); }
    double theta2() const { return (rho2 - rho3) * gravity * permeability / (mu2 + mu3); }
    double a_mu1() const { return (mu1 - mu2) / (mu1 + mu2); }
    double a_mu2() const { return (mu2 - mu3) / (mu2 + mu3); }

    /// min{(1+a1)/|a1|, (1-a2)/|a2|, |a1|(1-a1), |a2|(1+a2)} for the
    /// viscosity-ordered solvability bound; +inf when either a vanishes.
    double coercivity_margin() const;

    /// Throws std::invalid_argument on nonpositive mu/k/g/c_inf, and on a
    /// density ordering that breaks rho3 > rho2 > rho1 unless allow_unstable.
    void validate(bool allow_unstable = false) const;
};

/// The pair of interface profiles X = (f, h) over a shared grid; the upper
/// interface is the graph of c_inf + f, the lower one the graph of h.
struct InterfaceState {
    Profile f;
    Profile h;
    FluidParams params;

    InterfaceState() = default;
    InterfaceState(Profile f_, Profile h_, FluidParams p);

    const GridPtr& grid() const { return f.grid; }

    /// min over nodes of c_inf + f - h.
    double gap() const;

    /// Throws InterfaceCollision when gap <= 0 and WindowViolation when either
    /// profile has lost decay at the window edge.
    void validate() const;
};

/// Densities (omega1, omega2) of the interface velocity jumps.
struct VorticityDensity {
    Profile w1;
    Profile w2;
};

}  // namespace muskat
