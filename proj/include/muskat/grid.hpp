#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace muskat {

/// Thrown when a profile violates the truncation-window contract: the data
/// neither decays at the window edge nor extends smoothly across the seam.
class WindowViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform grid on [-L, L) with N nodes, x_j = -L + j*dx, treated as one
/// period of a 2L-periodic domain.
struct Grid {
    double half_length = 0.0;  // L
    int n_nodes = 0;           // N, even, >= 16
    double dx = 0.0;           // 2L/N
    double decay_tol = 1e-10;  // edge-band tolerance for the "decayed" predicate

    static std::shared_ptr<const Grid> make(double half_length, int n_nodes,
                                            double decay_tol = 1e-10);

    double node(int j) const { return -half_length + dx * static_cast<double>(j); }
    std::vector<double> nodes() const;

    /// Physical wavenumber of integer mode m: k_m = pi*m/L.
    double wavenumber(int m) const;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Real samples of a scalar function on a Grid.
struct Profile {
    GridPtr grid;
    std::vector<double> values;

    Profile() = default;
    explicit Profile(GridPtr g) : grid(std::move(g)), values(grid->n_nodes, 0.0) {}
    Profile(GridPtr g, std::vector<double> v);

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int j) const { return values[static_cast<size_t>(j)]; }
    double& operator[](int j) { return values[static_cast<size_t>(j)]; }

    double max_abs() const;
    /// Max |value| over the outer 10% of nodes (5% on each side of the window).
    double edge_max() const;
    bool decayed() const { return edge_max() <= grid->decay_tol; }
    /// True when the periodic extension is smooth at the window seam: either
    /// the edge band has decayed or the wrap-around second difference is no
    /// rougher than the interior ones (exact grid modes pass, ramps do not).
    bool spectral_ready() const;

    bool all_finite() const;
};

Profile operator+(const Profile& a, const Profile& b);
Profile operator-(const Profile& a, const Profile& b);
Profile operator*(double s, const Profile& p);
Profile pointwise_mul(const Profile& a, const Profile& b);

/// Complex mode coefficients c_m, m in [-N/2, N/2), of the trigonometric
/// interpolant values[j] = sum_m c_m exp(i k_m x_j) with k_m = pi*m/L.
struct SpectralCoeffs {
    GridPtr grid;
    std::vector<std::complex<double>> c;  // stored in FFT order: m = 0,1,...,-1

    std::complex<double> mode(int m) const;
    std::complex<double>& mode_ref(int m);
};

SpectralCoeffs transform(const Profile& p);
Profile inverse_transform(const SpectralCoeffs& s);

/// Spectral derivative of the periodic extension. Exact for band-limited data.
/// Throws WindowViolation unless the profile decays or is seam-smooth.
Profile derivative(const Profile& p);

/// Hilbert transform: multiplies mode m by -i*sign(k_m); the mean maps to zero.
Profile hilbert(const Profile& p);

/// Trapezoidal quadrature dx * sum(values); exact for the periodic extension.
double integrate(const Profile& p);

double mean(const Profile& p);

/// Amplitude of the real mode a*cos(k_m x)+b*sin(k_m x): returns sqrt(a^2+b^2).
double mode_amplitude(const Profile& p, int m);

/// cos/sin components of mode m: p ~ a*cos(k_m x) + b*sin(k_m x) + ...
std::pair<double, double> mode_components(const Profile& p, int m);

/// Evaluate the trigonometric interpolant at an arbitrary point.
double interp(const Profile& p, double x);

}  // namespace muskat
