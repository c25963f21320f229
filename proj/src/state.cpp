#include "muskat/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace muskat {

double FluidParams::coercivity_margin() const {
    const double a1 = a_mu1(), a2 = a_mu2();
    if (a1 == 0.0 || a2 == 0.0) return std::numeric_limits<double>::infinity();
    const double m1 = (1.0 + a1) / std::abs(a1);
    const double m2 = (1.0 - a2) / std::abs(a2);
    const double m3 = std::abs(a1) * (1.0 - a1);
    const double m4 = std::abs(a2) * (1.0 + a2);
    return std::min(std::min(m1, m2), std::min(m3, m4));
}

void FluidParams::validate(bool allow_unstable) const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("FluidParams: ") + name +
                                        " must be positive and finite");
    };
    positive(mu1, "mu1");
    positive(mu2, "mu2");
    positive(mu3, "mu3");
    positive(permeability, "permeability");
    positive(gravity, "gravity");
    positive(c_inf, "c_inf");
    if (!std::isfinite(rho1) || !std::isfinite(rho2) || !std::isfinite(rho3))
        throw std::invalid_argument("FluidParams: densities must be finite");
    if (!allow_unstable && !(rho3 > rho2 && rho2 > rho1))
        throw std::invalid_argument(
            "FluidParams: densities must satisfy rho3 > rho2 > rho1 (set allow_unstable to "
            "explore the gravitationally unstable regime)");
}

InterfaceState::InterfaceState(Profile f_, Profile h_, FluidParams p)
    : f(std::move(f_)), h(std::move(h_)), params(p) {
    if (f.grid != h.grid)
        throw std::invalid_argument("InterfaceState: f and h must share one grid");
}

double InterfaceState::gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (int j = 0; j < f.size(); ++j) g = std::min(g, params.c_inf + f[j] - h[j]);
    return g;
}

void InterfaceState::validate() const {
    if (!f.all_finite() || !h.all_finite())
        throw WindowViolation("InterfaceState: non-finite interface samples");
    const double g = gap();
    if (!(g > 0.0))
        throw InterfaceCollision("InterfaceState: interfaces touch or cross (gap = " +
                                 std::to_string(g) + ")");
    if (!f.decayed() || !h.decayed())
        throw WindowViolation("InterfaceState: interface profile lost decay at the window "
                              "edge (f edge " +
                              std::to_string(f.edge_max()) + ", h edge " +
                              std::to_string(h.edge_max()) + ", tol " +
                              std::to_string(f.grid->decay_tol) + ")");
}

}  // namespace muskat
