#include "muskat/linear.hpp"

#include <cmath>
#include <limits>

namespace muskat {

DispersionMatrix dispersion_matrix(double k, const FluidParams& params) {
    DispersionMatrix out;
    out.k = k;
    if (k == 0.0) return out;  // the derivative factor kills the zero mode

    const double a1 = params.a_mu1(), a2 = params.a_mu2();
    const double th1 = params.theta1(), th2 = params.theta2();
    const double E = std::exp(-params.c_inf * std::abs(k));
    const double E2 = E * E;
    const double den = 1.0 + a1 * a2 * E2;
    const double ak = std::abs(k);

    out.m[0][0] = ak * th1 * (1.0 + a2 * E2) / den;
    out.m[0][1] = ak * th2 * (1.0 - a1) * E / den;
    out.m[1][0] = ak * th1 * (1.0 + a2) * E / den;
    out.m[1][1] = ak * th2 * (1.0 - a1 * E2) / den;

    const double tr = out.m[0][0] + out.m[1][1];
    const double det = out.m[0][0] * out.m[1][1] - out.m[0][1] * out.m[1][0];
    const double disc = tr * tr / 4.0 - det;
    if (disc >= 0.0) {
        const double rt = std::sqrt(disc);
        out.lambda1 = tr / 2.0 + rt;
        out.lambda2 = tr / 2.0 - rt;
    } else {
        const double im = std::sqrt(-disc);
        out.lambda1 = {tr / 2.0, im};
        out.lambda2 = {tr / 2.0, -im};
    }
    return out;
}

PrincipalSymbol principal_symbol(const InterfaceState& X, const VorticityDensity& omega, int j0,
                                 bool second_interface) {
    if (j0 < 0 || j0 >= X.grid()->n_nodes)
        throw std::invalid_argument("principal_symbol: node index out of range");

    PrincipalSymbol out;
    Profile phi1 = apply_AB(KernelKind::B_op, X.f, omega.w1) +
                   apply_layer(KernelKind::T, X, omega.w2);
    Profile phi2 = apply_layer(KernelKind::Tprime, X, omega.w1) +
                   apply_AB(KernelKind::B_op, X.h, omega.w2);

    if (!second_interface) {
        const double a_mu = X.params.a_mu1();
        Profile fp = derivative(X.f);
        const double p = 1.0 + fp[j0] * fp[j0];
        out.alpha = (X.params.theta1() + a_mu * phi1[j0]) / p;

        Profile b11 = apply_Bnm0(1, 1, X.f, omega.w1);
        Profile c1w2 = apply_CD(KernelKind::C, 1, X, omega.w2);
        Profile c1hw2 = apply_CD(KernelKind::C, 1, X, pointwise_mul(X.h, omega.w2));
        const double a1X = (X.params.c_inf + X.f[j0]) * c1w2[j0] - c1hw2[j0];
        out.beta = b11[j0] + a1X + a_mu * omega.w1[j0] / p;
        return out;
    }

    // mirror image: swap the interfaces and flip the separation sign
    const double a_mu = X.params.a_mu2();
    Profile hp = derivative(X.h);
    const double p = 1.0 + hp[j0] * hp[j0];
    out.alpha = (X.params.theta2() + a_mu * phi2[j0]) / p;

    Profile b11 = apply_Bnm0(1, 1, X.h, omega.w2);
    Profile c1w1 = apply_CD(KernelKind::Cprime, 1, X, omega.w1);
    Profile c1fw1 = apply_CD(KernelKind::Cprime, 1, X, pointwise_mul(X.f, omega.w1));
    const double a1X = (X.h[j0] - X.params.c_inf) * c1w1[j0] - c1fw1[j0];
    out.beta = b11[j0] + a1X + a_mu * omega.w2[j0] / p;
    out.derived_by_analogy = true;
    return out;
}

std::vector<RtScanRow> rt_region_scan(const std::vector<FluidParams>& params,
                                      const std::vector<double>& k_grid) {
    std::vector<RtScanRow> table;
    table.reserve(params.size());
    for (const FluidParams& p : params) {
        RtScanRow row;
        row.params = p;
        row.rt_stable = p.theta1() < 0.0 && p.theta2() < 0.0;
        double gap = std::numeric_limits<double>::infinity();
        for (double k : k_grid) {
            if (k == 0.0) continue;
            const DispersionMatrix d = dispersion_matrix(k, p);
            gap = std::min(gap, -d.max_real_part());
        }
        row.min_spectral_gap = gap;
        table.push_back(row);
    }
    return table;
}

}  // namespace muskat
