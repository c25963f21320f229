#include "muskat/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace muskat {

std::shared_ptr<const Grid> Grid::make(double half_length, int n_nodes, double decay_tol) {
    if (!(half_length > 0.0))
        throw std::invalid_argument("Grid: half_length must be positive");
    if (n_nodes < 16 || n_nodes % 2 != 0)
        throw std::invalid_argument("Grid: n_nodes must be even and >= 16");
    if (!(decay_tol > 0.0))
        throw std::invalid_argument("Grid: decay_tol must be positive");
    auto g = std::make_shared<Grid>();
    g->half_length = half_length;
    g->n_nodes = n_nodes;
    g->dx = 2.0 * half_length / static_cast<double>(n_nodes);
    g->decay_tol = decay_tol;
    return g;
}

std::vector<double> Grid::nodes() const {
    std::vector<double> x(static_cast<size_t>(n_nodes));
    for (int j = 0; j < n_nodes; ++j) x[static_cast<size_t>(j)] = node(j);
    return x;
}

double Grid::wavenumber(int m) const { return std::numbers::pi * m / half_length; }

Profile::Profile(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid->n_nodes)
        throw std::invalid_argument("Profile: sample count does not match grid");
}

double Profile::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Profile::edge_max() const {
    const int n = size();
    const int band = std::max(1, n / 20);  // 5% of nodes on each side
    double m = 0.0;
    for (int j = 0; j < band; ++j) m = std::max(m, std::abs(values[static_cast<size_t>(j)]));
    for (int j = n - band; j < n; ++j) m = std::max(m, std::abs(values[static_cast<size_t>(j)]));
    return m;
}

bool Profile::spectral_ready() const {
    if (edge_max() <= grid->decay_tol) return true;
    // Compare wrap-around curvature against the interior: a smoothly periodic
    // profile has no curvature spike at the seam.
    const int n = size();
    auto d2 = [&](int j) {
        const int jm = (j + n - 1) % n, jp = (j + 1) % n;
        return values[static_cast<size_t>(jp)] - 2.0 * values[static_cast<size_t>(j)] +
               values[static_cast<size_t>(jm)];
    };
    double interior = 0.0;
    for (int j = 1; j < n - 1; ++j) interior = std::max(interior, std::abs(d2(j)));
    const double seam = std::max(std::abs(d2(0)), std::abs(d2(n - 1)));
    return seam <= 10.0 * interior + 1e-12 * (1.0 + max_abs());
}

bool Profile::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

Profile operator+(const Profile& a, const Profile& b) {
    Profile r(a.grid);
    for (int j = 0; j < a.size(); ++j) r[j] = a[j] + b[j];
    return r;
}
Profile operator-(const Profile& a, const Profile& b) {
    Profile r(a.grid);
    for (int j = 0; j < a.size(); ++j) r[j] = a[j] - b[j];
    return r;
}
Profile operator*(double s, const Profile& p) {
    Profile r(p.grid);
    for (int j = 0; j < p.size(); ++j) r[j] = s * p[j];
    return r;
}
Profile pointwise_mul(const Profile& a, const Profile& b) {
    Profile r(a.grid);
    for (int j = 0; j < a.size(); ++j) r[j] = a[j] * b[j];
    return r;
}

// ---------------------------------------------------------------------------
// FFT machinery. One cached plan pair per transform length; FFTW planning is
// not thread-safe, and we reuse a single scratch buffer, so all transforms
// serialize through a mutex. The O(N^2) kernel evaluations dominate runtime,
// not these O(N log N) transforms.
// ---------------------------------------------------------------------------
namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    fftw_complex* buf = nullptr;
    int n = 0;

    ~PlanPair() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

std::mutex g_fft_mutex;

PlanPair& plans_for(int n) {
    static std::map<int, std::unique_ptr<PlanPair>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        auto p = std::make_unique<PlanPair>();
        p->n = n;
        p->buf = fftw_alloc_complex(static_cast<size_t>(n));
        // FFTW_ESTIMATE keeps the plan (and therefore the results) deterministic.
        p->fwd = fftw_plan_dft_1d(n, p->buf, p->buf, FFTW_FORWARD, FFTW_ESTIMATE);
        p->bwd = fftw_plan_dft_1d(n, p->buf, p->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        it = cache.emplace(n, std::move(p)).first;
    }
    return *it->second;
}

// values[j] relate to modes via e^{i k_m x_j} = (-1)^m e^{2 pi i m j / N}
// because x_0 = -L; the (-1)^m phase is applied so that exposed coefficients
// follow the k_m = pi*m/L convention on [-L, L).
void forward_fft(const std::vector<double>& v, std::vector<std::complex<double>>& out) {
    const int n = static_cast<int>(v.size());
    std::lock_guard<std::mutex> lock(g_fft_mutex);
    PlanPair& p = plans_for(n);
    for (int j = 0; j < n; ++j) {
        p.buf[j][0] = v[static_cast<size_t>(j)];
        p.buf[j][1] = 0.0;
    }
    fftw_execute(p.fwd);
    out.resize(static_cast<size_t>(n));
    const double inv = 1.0 / static_cast<double>(n);
    for (int idx = 0; idx < n; ++idx) {
        const int m = idx <= n / 2 ? idx : idx - n;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        out[static_cast<size_t>(idx)] =
            sign * inv * std::complex<double>(p.buf[idx][0], p.buf[idx][1]);
    }
}

void backward_fft(const std::vector<std::complex<double>>& c, std::vector<double>& out) {
    const int n = static_cast<int>(c.size());
    std::lock_guard<std::mutex> lock(g_fft_mutex);
    PlanPair& p = plans_for(n);
    for (int idx = 0; idx < n; ++idx) {
        const int m = idx <= n / 2 ? idx : idx - n;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        const std::complex<double> z = sign * c[static_cast<size_t>(idx)];
        p.buf[idx][0] = z.real();
        p.buf[idx][1] = z.imag();
    }
    fftw_execute(p.bwd);
    out.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] = p.buf[j][0];
}

void require_spectral_ready(const Profile& p, const char* op) {
    if (!p.all_finite())
        throw WindowViolation(std::string(op) + ": profile has non-finite samples");
    if (!p.spectral_ready())
        throw WindowViolation(std::string(op) +
                              ": profile neither decays at the window edge nor extends "
                              "smoothly across the seam (edge max " +
                              std::to_string(p.edge_max()) + ", tol " +
                              std::to_string(p.grid->decay_tol) + ")");
}

}  // namespace

std::complex<double> SpectralCoeffs::mode(int m) const {
    const int n = static_cast<int>(c.size());
    const int idx = m >= 0 ? m : m + n;
    return c[static_cast<size_t>(idx)];
}

std::complex<double>& SpectralCoeffs::mode_ref(int m) {
    const int n = static_cast<int>(c.size());
    const int idx = m >= 0 ? m : m + n;
    return c[static_cast<size_t>(idx)];
}

SpectralCoeffs transform(const Profile& p) {
    SpectralCoeffs s;
    s.grid = p.grid;
    forward_fft(p.values, s.c);
    return s;
}

Profile inverse_transform(const SpectralCoeffs& s) {
    Profile p(s.grid);
    backward_fft(s.c, p.values);
    return p;
}

Profile derivative(const Profile& p) {
    require_spectral_ready(p, "derivative");
    SpectralCoeffs s = transform(p);
    const int n = p.size();
    for (int idx = 0; idx < n; ++idx) {
        const int m = idx <= n / 2 ? idx : idx - n;
        if (m == n / 2 || idx == n / 2) {
            s.c[static_cast<size_t>(idx)] = 0.0;  // Nyquist derivative vanishes on the grid
        } else {
            s.c[static_cast<size_t>(idx)] *= std::complex<double>(0.0, p.grid->wavenumber(m));
        }
    }
    return inverse_transform(s);
}

Profile hilbert(const Profile& p) {
    require_spectral_ready(p, "hilbert");
    SpectralCoeffs s = transform(p);
    const int n = p.size();
    for (int idx = 0; idx < n; ++idx) {
        const int m = idx <= n / 2 ? idx : idx - n;
        double sgn = 0.0;
        if (m > 0 && m != n / 2) sgn = 1.0;
        if (m < 0) sgn = -1.0;
        // symbol -i*sign(k); the mean and the (sign-ambiguous) Nyquist mode map to zero
        s.c[static_cast<size_t>(idx)] *= std::complex<double>(0.0, -sgn);
        if (m == 0 || m == n / 2) s.c[static_cast<size_t>(idx)] = 0.0;
    }
    return inverse_transform(s);
}

double integrate(const Profile& p) {
    double acc = 0.0;
    for (double v : p.values) acc += v;
    return acc * p.grid->dx;
}

double mean(const Profile& p) { return integrate(p) / (2.0 * p.grid->half_length); }

std::pair<double, double> mode_components(const Profile& p, int m) {
    SpectralCoeffs s = transform(p);
    if (m == 0) return {s.mode(0).real(), 0.0};
    const std::complex<double> cm = s.mode(m);
    // real profile: c_{-m} = conj(c_m); a cos + b sin has c_m = (a - i b)/2
    return {2.0 * cm.real(), -2.0 * cm.imag()};
}

double mode_amplitude(const Profile& p, int m) {
    auto [a, b] = mode_components(p, m);
    return std::hypot(a, b);
}

double interp(const Profile& p, double x) {
    SpectralCoeffs s = transform(p);
    const int n = p.size();
    double acc = 0.0;
    for (int idx = 0; idx < n; ++idx) {
        const int m = idx <= n / 2 ? idx : idx - n;
        const std::complex<double> cm = s.c[static_cast<size_t>(idx)];
        if (m == n / 2 || idx == n / 2) {
            acc += cm.real() * std::cos(p.grid->wavenumber(n / 2) * x);
        } else {
            const double km = p.grid->wavenumber(m);
            acc += cm.real() * std::cos(km * x) - cm.imag() * std::sin(km * x);
        }
    }
    return acc;
}

}  // namespace muskat
