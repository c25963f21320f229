#pragma once

#include <memory>
#include <span>

#include "muskat/state.hpp"

namespace muskat {

/// The integral-operator families acting on interface densities.
///   A_op, B_op      singular self-interaction kernels of one interface
///   S, Sprime       normal-trace coupling kernels between the interfaces
///   T, Tprime       tangential-trace coupling kernels
///   C, Cprime       even smoothing kernels 1/prod(s^2 + delta^2)
///   D, Dprime       odd smoothing kernels  s/prod(s^2 + delta^2)
enum class KernelKind { A_op, B_op, S, Sprime, T, Tprime, C, Cprime, D, Dprime };

/// Closed-form sums of rational kernels over the 2L-periodic image lattice
/// s + 2Ln, n in Z. Every kernel in this solver reduces to combinations of
/// these, so periodizing an operator costs no extra quadrature nodes. The
/// formulas are arranged to stay cancellation-free for small s and d.
struct LatticeSums {
    double L;  // half period
    double P;  // pi / (2L)

    explicit LatticeSums(double half_length);

    double pc(double s, double d) const;   // sum 1/(s_n^2 + d^2)
    double pd(double s, double d) const;   // sum s_n/(s_n^2 + d^2)
    double pc2(double s, double d) const;  // sum 1/(s_n^2 + d^2)^2
    double pd2(double s, double d) const;  // sum s_n/(s_n^2 + d^2)^2
    double pe(double s, double d) const;   // sum 1/(s_n (s_n^2 + d^2))
    double pf(double s, double d) const;   // sum 1/(s_n^2 (s_n^2 + d^2))
    double cot_sum(double s) const { return pd(s, 0.0); }   // sum 1/s_n
    double csc2_sum(double s) const { return pc(s, 0.0); }  // sum 1/s_n^2
};

/// Self-interaction operators of a single interface u.
///   A_op: (1/pi) PV int (s u'(x) - du)/(s^2 + du^2) w(x-s) ds, du = u(x)-u(x-s)
///   B_op: (1/pi) PV int (s + u'(x) du)/(s^2 + du^2) w(x-s) ds
/// The geometry profile u must decay (or be seam-smooth); the density w is
/// periodic data and is not gated.
Profile apply_AB(KernelKind kind, const Profile& u, const Profile& w);

/// Cross-interface operators with gap-bounded denominators; throws
/// InterfaceCollision when gap(X) <= 0. S/T act on a density living on the
/// lower interface, Sprime/Tprime on one living on the upper interface.
Profile apply_layer(KernelKind kind, const InterfaceState& X, const Profile& w);

/// The graded singular family
///   B_{n,m}(a_1..a_m)[b_1..b_n, w](x) =
///     (1/pi) PV int [prod_i delta b_i/s] / [prod_j (1 + (delta a_j/s)^2)] w(x-s)/s ds.
/// Supports n <= 3, m <= 2 (every combination the solver's formulas need).
Profile apply_Bnm(int n, int m, std::span<const Profile> a, std::span<const Profile> b,
                  const Profile& w);

/// B^0_{n,m}(u) = B_{n,m}(u,..,u)[u,..,u, w].
Profile apply_Bnm0(int n, int m, const Profile& u, const Profile& w);

/// Smoothing kernels C_m/D_m (and primed variants) of order m in {1, 2} with
/// every geometry slot set to X. Throws InterfaceCollision when gap(X) <= 0.
Profile apply_CD(KernelKind kind, int m, const InterfaceState& X, const Profile& w);

/// Identifies an operator whose dense quadrature rows can be materialized.
struct KernelOp {
    KernelKind kind;
    int order = 1;                      // m for the C/D families
    const Profile* u = nullptr;         // A_op/B_op geometry
    const InterfaceState* X = nullptr;  // layer/C/D geometry
};

/// Precomputed row generator: row j holds the quadrature weights of output
/// node j, including the analytic diagonal limit and the pole term routed
/// through the spectral differentiation row, so that matrix * w reproduces
/// the apply path to rounding. fill() is safe to call concurrently.
class KernelRows {
public:
    explicit KernelRows(const KernelOp& op);
    ~KernelRows();
    KernelRows(KernelRows&&) noexcept;
    KernelRows& operator=(KernelRows&&) noexcept;

    int size() const;
    void fill(int j, double* row) const;

private:
    std::unique_ptr<struct KernelRowsImpl> impl_;
};

}  // namespace muskat
