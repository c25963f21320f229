#include "muskat/kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "muskat/parallel.hpp"

namespace muskat {

// ---------------------------------------------------------------------------
// Lattice sums.
// ---------------------------------------------------------------------------

namespace {

inline double sinhc(double y) {
    if (std::abs(y) < 1e-8) return 1.0 + y * y / 6.0;
    return std::sinh(y) / y;
}

// (sinh y - y cosh y)/y^3, analytic, q(0) = -1/3
inline double q_series(double y) {
    if (std::abs(y) < 0.5) {
        const double y2 = y * y;
        return -(1.0 / 3.0) - y2 / 30.0 - y2 * y2 / 840.0 - y2 * y2 * y2 / 45360.0;
    }
    return (std::sinh(y) - y * std::cosh(y)) / (y * y * y);
}

// (sinh(2y)/(2y) - 1)/y^2, analytic, r(0) = 2/3
inline double r_series(double y) {
    if (std::abs(y) < 1e-4) {
        const double y2 = y * y;
        return 2.0 / 3.0 + 2.0 * y2 / 15.0;
    }
    return (std::sinh(2.0 * y) / (2.0 * y) - 1.0) / (y * y);
}

}  // namespace

LatticeSums::LatticeSums(double half_length)
    : L(half_length), P(std::numbers::pi / (2.0 * half_length)) {}

double LatticeSums::pc(double s, double d) const {
    const double y = P * d;
    const double sn = std::sin(P * s);
    const double sh = std::sinh(y);
    return P * P * sinhc(y) * std::cosh(y) / (sh * sh + sn * sn);
}

double LatticeSums::pd(double s, double d) const {
    const double y = P * d;
    const double sn = std::sin(P * s);
    const double sh = std::sinh(y);
    return P * sn * std::cos(P * s) / (sh * sh + sn * sn);
}

double LatticeSums::pc2(double s, double d) const {
    const double y = P * d;
    const double sn = std::sin(P * s);
    const double sh = std::sinh(y);
    const double D = sh * sh + sn * sn;
    const double s2 = sinhc(2.0 * y);
    const double P4 = P * P * P * P;
    return 2.0 * P4 * q_series(2.0 * y) / D + P4 * s2 * s2 / (D * D);
}

double LatticeSums::pd2(double s, double d) const {
    const double y = P * d;
    const double sn = std::sin(P * s);
    const double sh = std::sinh(y);
    const double D = sh * sh + sn * sn;
    return P * P * P * sinhc(2.0 * y) * sn * std::cos(P * s) / (D * D);
}

double LatticeSums::pe(double s, double d) const {
    const double y = P * d;
    const double sn = std::sin(P * s);
    const double sh = std::sinh(y);
    const double D = sh * sh + sn * sn;
    const double sc = sinhc(y);
    return P * P * P * sc * sc * std::cos(P * s) / (sn * D);
}

double LatticeSums::pf(double s, double d) const {
    const double y = P * d;
    const double sn = std::sin(P * s);
    const double sh = std::sinh(y);
    const double D = sh * sh + sn * sn;
    const double sc = sinhc(y);
    const double P4 = P * P * P * P;
    return P4 * (sc * sc - sn * sn * r_series(y)) / (sn * sn * D);
}

// ---------------------------------------------------------------------------
// Row generator. Row j of an operator holds the trapezoid weights of the
// periodized kernel at offsets s = (j-i)*dx, the analytic limit at the
// removable diagonal, and -pole_strength(x_j) times the spectral
// differentiation row realizing the principal-value 1/s part as -w'(x).
// The image terms of every raw kernel cancel pairwise at s = 0 (the delta
// differences vanish there), so only the local Taylor limit survives on the
// diagonal.
// ---------------------------------------------------------------------------

struct KernelRowsImpl {
    enum class Family { AB, Layer, Bnm } family = Family::AB;
    KernelKind kind = KernelKind::A_op;
    int order = 1;
    int n = 0;
    double c_inf = 0.0;
    double scale = 0.0;  // dx/pi
    LatticeSums lat{1.0};

    std::vector<double> s_off;  // signed offset by o = (j-i) mod N
    std::vector<double> dspec;  // spectral differentiation row by offset

    std::vector<double> u, up, upp;    // A_op/B_op geometry
    std::vector<double> f, fp, h, hp;  // layer geometry

    int bn = 0, bm = 0;  // B_{n,m}
    std::vector<std::vector<double>> av, apv, appv;
    std::vector<std::vector<double>> bv, bpv, bppv;

    void init_tables(const Grid& g) {
        n = g.n_nodes;
        scale = g.dx / std::numbers::pi;
        lat = LatticeSums(g.half_length);
        s_off.resize(static_cast<size_t>(n));
        dspec.resize(static_cast<size_t>(n));
        for (int o = 0; o < n; ++o) {
            const int l = o <= n / 2 ? o : o - n;
            const double so = l * g.dx;
            s_off[static_cast<size_t>(o)] = so;
            dspec[static_cast<size_t>(o)] =
                o == 0 ? 0.0 : ((o % 2 == 0) ? 1.0 : -1.0) * lat.P / std::tan(lat.P * so);
        }
    }

    void fill(int j, double* row) const {
        switch (family) {
            case Family::AB: fill_ab(j, row); break;
            case Family::Layer: fill_layer(j, row); break;
            case Family::Bnm: fill_bnm(j, row); break;
        }
    }

    void add_pole_row(double strength, int j, double* row) const {
        if (strength == 0.0) return;
        for (int i = 0; i < n; ++i) {
            const int o = (j - i + n) % n;
            row[i] -= scale * strength * dspec[static_cast<size_t>(o)];
        }
    }

    void fill_ab(int j, double* row) const {
        const size_t sj = static_cast<size_t>(j);
        const double uj = u[sj], upj = up[sj], uppj = upp[sj];
        const bool isA = kind == KernelKind::A_op;
        for (int i = 0; i < n; ++i) {
            const int o = (j - i + n) % n;
            if (o == 0) continue;
            const double s = s_off[static_cast<size_t>(o)];
            const double d = uj - u[static_cast<size_t>(i)];
            const double PC = lat.pc(s, d);
            const double PD = lat.pd(s, d);
            row[i] = scale * (isA ? upj * PD - d * PC : PD + upj * d * PC);
        }
        const double denom = 2.0 * (1.0 + upj * upj);
        row[j] = scale * (isA ? uppj / denom : upj * uppj / denom);
        if (!isA) add_pole_row(1.0, j, row);
    }

    void fill_layer(int j, double* row) const {
        const size_t sj = static_cast<size_t>(j);
        const bool primed = kind == KernelKind::Sprime || kind == KernelKind::Tprime ||
                            kind == KernelKind::Cprime || kind == KernelKind::Dprime;
        const double slope = primed ? hp[sj] : fp[sj];
        const double base = primed ? h[sj] - c_inf : c_inf + f[sj];
        const std::vector<double>& other = primed ? f : h;
        for (int i = 0; i < n; ++i) {
            const int o = (j - i + n) % n;
            const double s = s_off[static_cast<size_t>(o)];
            const double d = base - other[static_cast<size_t>(i)];
            double v = 0.0;
            switch (kind) {
                case KernelKind::S:
                case KernelKind::Sprime: v = slope * lat.pd(s, d) - d * lat.pc(s, d); break;
                case KernelKind::T:
                case KernelKind::Tprime: v = lat.pd(s, d) + slope * d * lat.pc(s, d); break;
                case KernelKind::C:
                case KernelKind::Cprime: v = order == 1 ? lat.pc(s, d) : lat.pc2(s, d); break;
                default: v = order == 1 ? lat.pd(s, d) : lat.pd2(s, d); break;
            }
            row[i] = scale * v;
        }
    }

    void fill_bnm(int j, double* row) const {
        const size_t sj = static_cast<size_t>(j);
        // pole strength g(x,0) = prod b'/prod(1+a'^2) and the d/ds limit of the
        // subtracted integrand, (P'Q - PQ')/Q^2 with P(0) = prod b',
        // P'(0) = sum_i (-b_i''/2) prod_{l!=i} b_l', Q(0) = prod(1+a'^2),
        // Q'(0) = sum_j (-a_j' a_j'') prod_{l!=j} (1+a_l'^2).
        double Q0 = 1.0;
        for (int q = 0; q < bm; ++q) {
            const double ap = apv[static_cast<size_t>(q)][sj];
            Q0 *= 1.0 + ap * ap;
        }
        double Qp = 0.0;
        for (int q = 0; q < bm; ++q) {
            double t = -apv[static_cast<size_t>(q)][sj] * appv[static_cast<size_t>(q)][sj];
            for (int r = 0; r < bm; ++r) {
                if (r == q) continue;
                const double ap = apv[static_cast<size_t>(r)][sj];
                t *= 1.0 + ap * ap;
            }
            Qp += t;
        }
        double P0 = 1.0;
        for (int q = 0; q < bn; ++q) P0 *= bpv[static_cast<size_t>(q)][sj];
        double Pp = 0.0;
        for (int q = 0; q < bn; ++q) {
            double t = -0.5 * bppv[static_cast<size_t>(q)][sj];
            for (int r = 0; r < bn; ++r)
                if (r != q) t *= bpv[static_cast<size_t>(r)][sj];
            Pp += t;
        }
        const double pole = P0 / Q0;
        const double diag = (Pp * Q0 - P0 * Qp) / (Q0 * Q0);

        const int p = 2 * bm - bn - 1;  // power of s left in the reduced numerator
        for (int i = 0; i < n; ++i) {
            const int o = (j - i + n) % n;
            if (o == 0) {
                row[i] = scale * diag;
                continue;
            }
            const double s = s_off[static_cast<size_t>(o)];
            double num = 1.0;
            for (int q = 0; q < bn; ++q)
                num *= bv[static_cast<size_t>(q)][sj] -
                       bv[static_cast<size_t>(q)][static_cast<size_t>(i)];
            double latsum = 0.0;
            if (bm == 1) {
                const double d = av[0][sj] - av[0][static_cast<size_t>(i)];
                switch (p) {
                    case 1: latsum = lat.pd(s, d); break;
                    case 0: latsum = lat.pc(s, d); break;
                    case -1: latsum = lat.pe(s, d); break;
                    default: latsum = lat.pf(s, d); break;  // p == -2
                }
            } else {
                const double d1 = av[0][sj] - av[0][static_cast<size_t>(i)];
                const double d2 = av[1][sj] - av[1][static_cast<size_t>(i)];
                const double t1 = d1 * d1, t2 = d2 * d2;
                // divided differences of pc/pd in d^2; switch to the exact
                // equal-argument derivative forms when t1 ~ t2
                double PCp, PDp;
                if (std::abs(t1 - t2) <= 1e-6 * (t1 + t2 + 1e-300)) {
                    const double dm = std::sqrt(0.5 * (t1 + t2));
                    PCp = lat.pc2(s, dm);
                    PDp = lat.pd2(s, dm);
                } else {
                    PCp = (lat.pc(s, d1) - lat.pc(s, d2)) / (t2 - t1);
                    PDp = (lat.pd(s, d1) - lat.pd(s, d2)) / (t2 - t1);
                }
                switch (p) {
                    case 3: latsum = lat.pd(s, d2) - t1 * PDp; break;
                    case 2: latsum = lat.pc(s, d2) - t1 * PCp; break;
                    case 1: latsum = PDp; break;
                    default: latsum = PCp; break;  // p == 0
                }
            }
            row[i] = scale * num * latsum;
        }
        add_pole_row(pole, j, row);
    }
};

// ---------------------------------------------------------------------------
// Validation helpers and public entry points.
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxBnmNumerator = 3;
constexpr int kMaxBnmDenominator = 2;

void check_same_grid(const GridPtr& a, const GridPtr& b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": inputs on different grids");
}

void require_geometry(const Profile& u, const char* what) {
    if (!u.all_finite())
        throw WindowViolation(std::string(what) + ": geometry profile has non-finite samples");
    if (!u.spectral_ready())
        throw WindowViolation(std::string(what) +
                              ": geometry profile violates the window (no decay at the edges)");
}

void require_gap(const InterfaceState& X, const char* what) {
    const double g = X.gap();
    if (!(g > 0.0))
        throw InterfaceCollision(std::string(what) + ": interfaces touch or cross (gap = " +
                                 std::to_string(g) + ")");
}

std::unique_ptr<KernelRowsImpl> build_ab(KernelKind kind, const Profile& u) {
    auto impl = std::make_unique<KernelRowsImpl>();
    impl->family = KernelRowsImpl::Family::AB;
    impl->kind = kind;
    impl->init_tables(*u.grid);
    impl->u = u.values;
    Profile up = derivative(u);
    impl->up = up.values;
    impl->upp = derivative(up).values;
    return impl;
}

std::unique_ptr<KernelRowsImpl> build_layer(KernelKind kind, const InterfaceState& X, int order) {
    auto impl = std::make_unique<KernelRowsImpl>();
    impl->family = KernelRowsImpl::Family::Layer;
    impl->kind = kind;
    impl->order = order;
    impl->init_tables(*X.grid());
    impl->c_inf = X.params.c_inf;
    impl->f = X.f.values;
    impl->h = X.h.values;
    impl->fp = derivative(X.f).values;
    impl->hp = derivative(X.h).values;
    return impl;
}

std::unique_ptr<KernelRowsImpl> build_bnm(int n, int m, std::span<const Profile> a,
                                          std::span<const Profile> b, const GridPtr& grid) {
    auto impl = std::make_unique<KernelRowsImpl>();
    impl->family = KernelRowsImpl::Family::Bnm;
    impl->init_tables(*grid);
    impl->bn = n;
    impl->bm = m;
    for (const Profile& p : a) {
        impl->av.push_back(p.values);
        Profile ap = derivative(p);
        impl->apv.push_back(ap.values);
        impl->appv.push_back(derivative(ap).values);
    }
    for (const Profile& p : b) {
        impl->bv.push_back(p.values);
        Profile bp = derivative(p);
        impl->bpv.push_back(bp.values);
        impl->bppv.push_back(derivative(bp).values);
    }
    return impl;
}

Profile run_rows(const KernelRowsImpl& impl, const Profile& w) {
    Profile out(w.grid);
    const int n = impl.n;
    parallel_for(n, [&](int j) {
        std::vector<double> row(static_cast<size_t>(n), 0.0);
        impl.fill(j, row.data());
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += row[static_cast<size_t>(i)] * w[i];
        out[j] = acc;
    });
    return out;
}

}  // namespace

Profile apply_AB(KernelKind kind, const Profile& u, const Profile& w) {
    if (kind != KernelKind::A_op && kind != KernelKind::B_op)
        throw std::invalid_argument("apply_AB: kind must be A_op or B_op");
    check_same_grid(u.grid, w.grid, "apply_AB");
    require_geometry(u, "apply_AB");
    return run_rows(*build_ab(kind, u), w);
}

Profile apply_layer(KernelKind kind, const InterfaceState& X, const Profile& w) {
    if (kind != KernelKind::S && kind != KernelKind::Sprime && kind != KernelKind::T &&
        kind != KernelKind::Tprime)
        throw std::invalid_argument("apply_layer: kind must be one of S, Sprime, T, Tprime");
    check_same_grid(X.grid(), w.grid, "apply_layer");
    require_gap(X, "apply_layer");
    return run_rows(*build_layer(kind, X, 1), w);
}

Profile apply_CD(KernelKind kind, int m, const InterfaceState& X, const Profile& w) {
    if (kind != KernelKind::C && kind != KernelKind::Cprime && kind != KernelKind::D &&
        kind != KernelKind::Dprime)
        throw std::invalid_argument("apply_CD: kind must be one of C, Cprime, D, Dprime");
    if (m < 1 || m > kMaxBnmDenominator)
        throw std::invalid_argument("apply_CD: order m must be 1 or 2");
    check_same_grid(X.grid(), w.grid, "apply_CD");
    require_gap(X, "apply_CD");
    return run_rows(*build_layer(kind, X, m), w);
}

Profile apply_Bnm(int n, int m, std::span<const Profile> a, std::span<const Profile> b,
                  const Profile& w) {
    if (m < 1 || m > kMaxBnmDenominator || n < 0 || n > kMaxBnmNumerator)
        throw std::invalid_argument("apply_Bnm: supported range is n in [0,3], m in [1,2]");
    if (static_cast<int>(a.size()) != m || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("apply_Bnm: need m denominator and n numerator profiles");
    for (const Profile& p : a) {
        check_same_grid(p.grid, w.grid, "apply_Bnm");
        require_geometry(p, "apply_Bnm");
    }
    for (const Profile& p : b) {
        check_same_grid(p.grid, w.grid, "apply_Bnm");
        require_geometry(p, "apply_Bnm");
    }
    return run_rows(*build_bnm(n, m, a, b, w.grid), w);
}

Profile apply_Bnm0(int n, int m, const Profile& u, const Profile& w) {
    std::vector<Profile> a(static_cast<size_t>(m), u);
    std::vector<Profile> b(static_cast<size_t>(n), u);
    return apply_Bnm(n, m, a, b, w);
}

KernelRows::KernelRows(const KernelOp& op) {
    switch (op.kind) {
        case KernelKind::A_op:
        case KernelKind::B_op:
            if (!op.u) throw std::invalid_argument("KernelRows: A_op/B_op need a geometry profile");
            require_geometry(*op.u, "KernelRows");
            impl_ = build_ab(op.kind, *op.u);
            break;
        default:
            if (!op.X) throw std::invalid_argument("KernelRows: layer kernels need a state");
            require_gap(*op.X, "KernelRows");
            impl_ = build_layer(op.kind, *op.X, op.order);
            break;
    }
}

KernelRows::~KernelRows() = default;
KernelRows::KernelRows(KernelRows&&) noexcept = default;
KernelRows& KernelRows::operator=(KernelRows&&) noexcept = default;

int KernelRows::size() const { return impl_->n; }

void KernelRows::fill(int j, double* row) const { impl_->fill(j, row); }

}  // namespace muskat
