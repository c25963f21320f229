#pragma once

#include <array>

#include "muskat/bie.hpp"

namespace muskat {

/// Thrown when a bulk evaluation is requested within the near-interface
/// exclusion zone (2 dx of either graph) where the quadrature degrades;
/// callers should use the trace formulas there instead.
class NearInterfaceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Region { Omega1, Omega2, Omega3, NearInterface };

const char* region_name(Region r);

struct FieldPoint {
    double x = 0.0;
    double y = 0.0;
    Region region = Region::Omega2;
};

/// Region of (x, y) relative to the graphs y = c_inf + f(x) and y = h(x);
/// NearInterface within 2 dx of either graph.
Region classify(const InterfaceState& X, double x, double y);

/// Kernel domain used for bulk fields: Periodic matches the interface
/// operators (one 2L-periodic strip); RealLine integrates the raw kernels
/// over the window, appropriate for decay studies of localized densities.
enum class FieldMode { Periodic, RealLine };

/// Bulk velocity and pressure evaluation bound to one (X, omega) pair.
/// Precomputes trace profiles, per-source tables, and the pressure gauge
/// constants (p2 - p1 = 0 at x = 0 on the upper interface, p3 - p2 = 0 at
/// x = 0 on the lower one).
class FieldEvaluator {
public:
    FieldEvaluator(const InterfaceState& X, const VorticityDensity& omega,
                   FieldMode mode = FieldMode::Periodic);

    const InterfaceState& state() const { return X_; }
    FieldMode mode() const { return mode_; }

    /// Velocity at a bulk point; throws NearInterfaceError inside the
    /// exclusion zone.
    std::array<double, 2> velocity(double x, double y) const;

    /// One-sided interface velocities: interface 'f' with side Omega1/Omega2,
    /// interface 'h' with side Omega2/Omega3. Returns (v_x, v_y) profiles.
    std::pair<Profile, Profile> trace(char interface, Region side) const;

    /// Pressure at a bulk point of region i (1-based); validates the region
    /// and throws NearInterfaceError in the exclusion zone.
    double pressure(int region_i, double x, double y) const;

    /// Jump profiles along the interfaces, gauge-anchored to vanish at x = 0:
    /// p2 - p1 on the upper interface, p3 - p2 on the lower one. Constant
    /// (up to quadrature error) exactly when omega solves the density system.
    Profile pressure_jump_profile(char interface) const;

    /// Magnitude scale of the interface pressures, for relative-span checks.
    double pressure_scale() const;

    /// v + (k/mu_i)(grad p + (0, rho_i g)) by centered differences of the
    /// pressure at a bulk point.
    std::array<double, 2> darcy_residual(double x, double y) const;

    /// Unchecked bulk velocity; used internally by path quadratures whose
    /// geometry keeps clear of the interfaces.
    std::array<double, 2> velocity_unchecked(double x, double y) const;

    double interface_y(char interface, double x) const;  // c_inf + f(x) or h(x)

private:
    double pressure_raw(int region_i, double x, double y) const;
    double pressure_on_interface(char interface, int region_i, int node) const;

    InterfaceState X_;
    VorticityDensity w_;
    FieldMode mode_;
    // per-source tables for the addition-theorem fast path
    std::vector<double> sin_px_, cos_px_;    // P * x_j
    std::vector<double> shf_, chf_, shh_, chh_;  // P*(c_inf+f_j), P*h_j
    SpectralCoeffs fc_, hc_;
    Profile fp_, hp_;
    // traces per interface/side
    Profile tf1x_, tf1y_, tf2x_, tf2y_;  // f-interface, Omega1/Omega2 sides
    Profile th2x_, th2y_, th3x_, th3y_;  // h-interface, Omega2/Omega3 sides
    double c2_ = 0.0, c3_ = 0.0;         // gauge constants (c1 = 0)
    double p_scale_ = 1.0;
};

/// Convenience wrappers matching the one-shot call style.
std::array<double, 2> velocity_at(const InterfaceState& X, const VorticityDensity& omega,
                                  double x, double y, FieldMode mode = FieldMode::Periodic);
std::pair<Profile, Profile> trace_at(const InterfaceState& X, const VorticityDensity& omega,
                                     char interface, Region side);
double pressure_at(const InterfaceState& X, const VorticityDensity& omega, int region_i,
                   double x, double y);

/// The three trace-quadratic identities of the divergence-free, curl-free
/// bulk field, including the far-field flux of the periodic strip (the
/// uniform flow +-(m1+m2)/(4L) at y -> -+infinity contributes
/// (m1+m2)^2/(2L) to the two unbounded regions). Holds for every density
/// pair, not only solutions of the density system. Returns the residuals;
/// scales (the integral of |each quadratic term|) via the out parameter.
std::array<double, 3> rellich_residuals(const InterfaceState& X, const VorticityDensity& omega,
                                        std::array<double, 3>* scales = nullptr);

}  // namespace muskat
