#include "muskat/bie.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "muskat/parallel.hpp"

namespace muskat {

namespace {

// in-house dgemv (row-major, y = M x); avoids a cblas dependency for the few
// matvecs outside LAPACK
void matvec_acc(const std::vector<double>& M, const double* x, double* y, int n, bool zero_y) {
    parallel_for(n, [&](int j) {
        const double* row = M.data() + static_cast<size_t>(j) * static_cast<size_t>(n);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += row[i] * x[i];
        if (zero_y)
            y[j] = acc;
        else
            y[j] += acc;
    });
}

struct LuFactor {
    int n = 0;
    std::vector<double> lu;        // row-major
    std::vector<lapack_int> ipiv;
    double anorm = 0.0;            // 1-norm of the original matrix

    // Factorizes in place; returns false when LAPACK reports singularity.
    bool factorize(std::vector<double> M) {
        lu = std::move(M);
        ipiv.resize(static_cast<size_t>(n));
        anorm = LAPACKE_dlange(LAPACK_ROW_MAJOR, '1', n, n, lu.data(), n);
        const lapack_int info =
            LAPACKE_dgetrf(LAPACK_ROW_MAJOR, n, n, lu.data(), n, ipiv.data());
        return info == 0;
    }

    void solve(double* x) const {
        LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', n, 1, lu.data(), n, ipiv.data(), x, 1);
    }

    double condition_estimate() const {
        double rcond = 0.0;
        LAPACKE_dgecon(LAPACK_ROW_MAJOR, '1', n, lu.data(), n, anorm, &rcond);
        if (!(rcond > 0.0)) return std::numeric_limits<double>::infinity();
        return 1.0 / rcond;
    }
};

std::vector<double> dense_rows(const KernelOp& op) {
    KernelRows rows(op);
    const int n = rows.size();
    std::vector<double> M(static_cast<size_t>(n) * static_cast<size_t>(n));
    parallel_for(n, [&](int j) {
        rows.fill(j, M.data() + static_cast<size_t>(j) * static_cast<size_t>(n));
    });
    return M;
}

// 2N x 2N system matrix I - diag(a1, a2) * CalA(X), row-major
std::vector<double> system_matrix(const DiscreteBlockOperator& calA, double a1, double a2) {
    const int n = calA.n;
    const int nn = 2 * n;
    std::vector<double> M(static_cast<size_t>(nn) * static_cast<size_t>(nn));
    parallel_for(n, [&](int j) {
        double* top = M.data() + static_cast<size_t>(j) * nn;
        double* bot = M.data() + static_cast<size_t>(j + n) * nn;
        const double* a11 = calA.b11.data() + static_cast<size_t>(j) * n;
        const double* a12 = calA.b12.data() + static_cast<size_t>(j) * n;
        const double* a21 = calA.b21.data() + static_cast<size_t>(j) * n;
        const double* a22 = calA.b22.data() + static_cast<size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            top[i] = -a1 * a11[i];
            top[i + n] = -a1 * a12[i];
            bot[i] = -a2 * a21[i];
            bot[i + n] = -a2 * a22[i];
        }
        top[j] += 1.0;
        bot[j + n] += 1.0;
    });
    return M;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// deterministic start vector for the power iteration
std::vector<double> power_start(int n) {
    std::vector<double> v(static_cast<size_t>(n));
    uint64_t s = 0x9e3779b97f4a7c15ull;
    for (int j = 0; j < n; ++j) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        const double r = static_cast<double>(s >> 11) * 0x1.0p-53;
        v[static_cast<size_t>(j)] = 1.0 + 0.05 * (r - 0.5);
    }
    return v;
}

}  // namespace

void DiscreteBlockOperator::matvec(const double* in1, const double* in2, double* out1,
                                   double* out2) const {
    matvec_acc(b11, in1, out1, n, true);
    matvec_acc(b12, in2, out1, n, false);
    matvec_acc(b21, in1, out2, n, true);
    matvec_acc(b22, in2, out2, n, false);
}

std::pair<Profile, Profile> DiscreteBlockOperator::apply(const Profile& w1,
                                                         const Profile& w2) const {
    Profile o1(grid), o2(grid);
    matvec(w1.values.data(), w2.values.data(), o1.values.data(), o2.values.data());
    return {std::move(o1), std::move(o2)};
}

DiscreteBlockOperator assemble(BlockWhich which, const InterfaceState& X) {
    X.validate();
    DiscreteBlockOperator op;
    op.which = which;
    op.grid = X.grid();
    op.n = op.grid->n_nodes;
    if (which == BlockWhich::CalA) {
        op.b11 = dense_rows({KernelKind::A_op, 1, &X.f, nullptr});
        op.b12 = dense_rows({KernelKind::S, 1, nullptr, &X});
        op.b21 = dense_rows({KernelKind::Sprime, 1, nullptr, &X});
        op.b22 = dense_rows({KernelKind::A_op, 1, &X.h, nullptr});
    } else {
        op.b11 = dense_rows({KernelKind::B_op, 1, &X.f, nullptr});
        op.b12 = dense_rows({KernelKind::T, 1, nullptr, &X});
        op.b21 = dense_rows({KernelKind::Tprime, 1, nullptr, &X});
        op.b22 = dense_rows({KernelKind::B_op, 1, &X.h, nullptr});
    }
    return op;
}

VorticityDensity solve_omega(const InterfaceState& X, SolveInfo* info) {
    X.validate();
    const int n = X.grid()->n_nodes;
    const double a1 = X.params.a_mu1();
    const double a2 = X.params.a_mu2();
    const double th1 = X.params.theta1();
    const double th2 = X.params.theta2();

    Profile fp = derivative(X.f);
    Profile hp = derivative(X.h);
    std::vector<double> rhs(static_cast<size_t>(2 * n));
    for (int j = 0; j < n; ++j) {
        rhs[static_cast<size_t>(j)] = th1 * fp[j];
        rhs[static_cast<size_t>(j + n)] = th2 * hp[j];
    }
    const double rhs_inf = inf_norm(rhs);

    VorticityDensity w{Profile(X.grid()), Profile(X.grid())};

    auto attach_radius = [&]() -> std::optional<double> {
        if (a1 * a2 < 0.0) {
            try {
                return neumann_radius(X, a1, a2);
            } catch (const std::exception&) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    };

    SolveInfo local;
    local.rhs_inf = rhs_inf;
    local.coercivity_margin = X.params.coercivity_margin();

    if (a1 == 0.0 && a2 == 0.0) {
        // equal viscosities: the system is the identity
        for (int j = 0; j < n; ++j) {
            w.w1[j] = rhs[static_cast<size_t>(j)];
            w.w2[j] = rhs[static_cast<size_t>(j + n)];
        }
        local.residual_inf = 0.0;
        local.cond_estimate = 1.0;
        if (info) *info = local;
        return w;
    }

    DiscreteBlockOperator calA = assemble(BlockWhich::CalA, X);
    LuFactor lu;
    lu.n = 2 * n;
    if (!lu.factorize(system_matrix(calA, a1, a2)))
        throw InvertibilityFailure("solve_omega: LU factorization failed",
                                   std::numeric_limits<double>::infinity(), attach_radius());
    local.cond_estimate = lu.condition_estimate();
    if (!(local.cond_estimate < kCondMax))
        throw InvertibilityFailure(
            "solve_omega: condition estimate " + std::to_string(local.cond_estimate) +
                " exceeds the ceiling " + std::to_string(kCondMax),
            local.cond_estimate, attach_radius());

    std::vector<double> sol = rhs;
    lu.solve(sol.data());

    // residual via operator applies, independent of the dense matrix path
    auto residual = [&](const std::vector<double>& cand, std::vector<double>& r) {
        for (int j = 0; j < n; ++j) {
            w.w1[j] = cand[static_cast<size_t>(j)];
            w.w2[j] = cand[static_cast<size_t>(j + n)];
        }
        auto [c1, c2] = calA.apply(w.w1, w.w2);
        double m = 0.0;
        for (int j = 0; j < n; ++j) {
            r[static_cast<size_t>(j)] =
                rhs[static_cast<size_t>(j)] - (cand[static_cast<size_t>(j)] - a1 * c1[j]);
            r[static_cast<size_t>(j + n)] =
                rhs[static_cast<size_t>(j + n)] - (cand[static_cast<size_t>(j + n)] - a2 * c2[j]);
            m = std::max({m, std::abs(r[static_cast<size_t>(j)]),
                          std::abs(r[static_cast<size_t>(j + n)])});
        }
        return m;
    };

    std::vector<double> r(static_cast<size_t>(2 * n));
    double res = residual(sol, r);
    const double target = 1e-10 * rhs_inf;
    while (res > target && local.refinement_steps < 3) {
        lu.solve(r.data());
        for (size_t i = 0; i < sol.size(); ++i) sol[i] += r[i];
        res = residual(sol, r);
        ++local.refinement_steps;
    }
    if (rhs_inf > 0.0 && res > target)
        throw InvertibilityFailure("solve_omega: residual " + std::to_string(res) +
                                       " exceeds 1e-10 * ||rhs||_inf after refinement",
                                   local.cond_estimate, attach_radius());
    local.residual_inf = res;

    for (int j = 0; j < n; ++j) {
        w.w1[j] = sol[static_cast<size_t>(j)];
        w.w2[j] = sol[static_cast<size_t>(j + n)];
    }
    if (info) *info = local;
    return w;
}

std::pair<Profile, Profile> compute_phi(const InterfaceState& X, VorticityDensity* omega_out,
                                        SolveInfo* info) {
    VorticityDensity w = solve_omega(X, info);
    Profile phi1 = apply_AB(KernelKind::B_op, X.f, w.w1) + apply_layer(KernelKind::T, X, w.w2);
    Profile phi2 =
        apply_layer(KernelKind::Tprime, X, w.w1) + apply_AB(KernelKind::B_op, X.h, w.w2);
    if (omega_out) *omega_out = std::move(w);
    return {std::move(phi1), std::move(phi2)};
}

double neumann_radius(const InterfaceState& X, double a1, double a2, int iters, double tol) {
    if (!(std::abs(a1) < 1.0 && std::abs(a2) < 1.0))
        throw std::invalid_argument("neumann_radius: need |a1|, |a2| < 1");
    X.validate();
    if (a1 * a2 == 0.0) return 0.0;
    const int n = X.grid()->n_nodes;

    std::vector<double> Af = dense_rows({KernelKind::A_op, 1, &X.f, nullptr});
    std::vector<double> Ah = dense_rows({KernelKind::A_op, 1, &X.h, nullptr});
    std::vector<double> S = dense_rows({KernelKind::S, 1, nullptr, &X});
    std::vector<double> Sp = dense_rows({KernelKind::Sprime, 1, nullptr, &X});

    auto resolvent = [&](const std::vector<double>& A, double a) {
        std::vector<double> M(static_cast<size_t>(n) * static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            const double* row = A.data() + static_cast<size_t>(j) * n;
            double* out = M.data() + static_cast<size_t>(j) * n;
            for (int i = 0; i < n; ++i) out[i] = -a * row[i];
            out[j] += 1.0;
        }
        LuFactor lu;
        lu.n = n;
        if (!lu.factorize(std::move(M)))
            throw InvertibilityFailure("neumann_radius: inner resolvent factorization failed",
                                       std::numeric_limits<double>::infinity(), std::nullopt);
        return lu;
    };
    LuFactor lu_f = resolvent(Af, a1);
    LuFactor lu_h = resolvent(Ah, a2);

    std::vector<double> v = power_start(n), t(static_cast<size_t>(n));
    auto apply_TA = [&](std::vector<double>& x) {
        matvec_acc(Sp, x.data(), t.data(), n, true);
        lu_h.solve(t.data());
        matvec_acc(S, t.data(), x.data(), n, true);
        lu_f.solve(x.data());
        for (double& xv : x) xv *= a1 * a2;
    };

    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<double> prev = v;
        apply_TA(v);
        double num = 0.0, den = 0.0, nrm = 0.0;
        for (int j = 0; j < n; ++j) {
            num += prev[static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
            den += prev[static_cast<size_t>(j)] * prev[static_cast<size_t>(j)];
            nrm += v[static_cast<size_t>(j)] * v[static_cast<size_t>(j)];
        }
        const double next = den > 0.0 ? num / den : 0.0;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return 0.0;
        for (double& xv : v) xv /= nrm;
        if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::abs(lambda);
}

std::pair<Profile, Profile> rayleigh_taylor(const InterfaceState& X) {
    auto [phi1, phi2] = compute_phi(X);
    return rayleigh_taylor_from_phi(X, phi1, phi2);
}

std::pair<Profile, Profile> rayleigh_taylor_from_phi(const InterfaceState& X, const Profile& phi1,
                                                     const Profile& phi2) {
    Profile r1(X.grid()), r2(X.grid());
    const double th1 = X.params.theta1(), th2 = X.params.theta2();
    const double a1 = X.params.a_mu1(), a2 = X.params.a_mu2();
    for (int j = 0; j < r1.size(); ++j) {
        r1[j] = th1 + a1 * phi1[j];
        r2[j] = th2 + a2 * phi2[j];
    }
    return {std::move(r1), std::move(r2)};
}

double resolvent_condition(const InterfaceState& X, double lambda) {
    DiscreteBlockOperator calA = assemble(BlockWhich::CalA, X);
    const int n = calA.n;
    // lambda*I - CalA = -(I - (1/lambda) CalA) * (-lambda): reuse the system builder
    std::vector<double> M = system_matrix(calA, 1.0, 1.0);
    // system_matrix produced I - CalA; rescale to lambda*I - CalA
    for (int j = 0; j < 2 * n; ++j) {
        double* row = M.data() + static_cast<size_t>(j) * (2 * n);
        for (int i = 0; i < 2 * n; ++i) {
            const double calA_ji = (i == j ? 1.0 : 0.0) - row[i];
            row[i] = (i == j ? lambda : 0.0) - calA_ji;
        }
    }
    LuFactor lu;
    lu.n = 2 * n;
    if (!lu.factorize(std::move(M))) return std::numeric_limits<double>::infinity();
    return lu.condition_estimate();
}

}  // namespace muskat
