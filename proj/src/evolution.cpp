#include "muskat/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace muskat {

void StepperConfig::validate() const {
    if (!(t_end >= 0.0)) throw std::invalid_argument("StepperConfig: t_end must be >= 0");
    if (!(rtol > 0.0) || !(atol > 0.0))
        throw std::invalid_argument("StepperConfig: rtol and atol must be positive");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw std::invalid_argument("StepperConfig: cfl_safety must lie in (0, 1]");
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
        throw std::invalid_argument("StepperConfig: need 0 < dt_min <= dt_init <= dt_max");
    if (monitor_every < 1) throw std::invalid_argument("StepperConfig: monitor_every >= 1");
    if (!(gap_min_rel > 0.0)) throw std::invalid_argument("StepperConfig: gap_min_rel > 0");
}

const char* event_name(EventKind kind) {
    switch (kind) {
        case EventKind::ReachedTEnd: return "t_end-reached";
        case EventKind::RTViolation: return "rt-violation";
        case EventKind::Collision: return "interface-collision";
        case EventKind::WindowViolation: return "window-violation";
        case EventKind::InvertibilityFailure: return "invertibility-failure";
        case EventKind::StiffnessFailure: return "stiffness-failure";
    }
    return "unknown";
}

int event_exit_code(EventKind kind) {
    switch (kind) {
        case EventKind::ReachedTEnd: return 0;
        case EventKind::RTViolation: return 10;
        case EventKind::Collision: return 11;
        case EventKind::WindowViolation: return 12;
        case EventKind::InvertibilityFailure: return 13;
        case EventKind::StiffnessFailure: return 14;
    }
    return 1;
}

std::pair<Profile, Profile> rhs(const InterfaceState& X) { return compute_phi(X); }

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// y5 - y4 weights (includes the k7 stage)
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

struct Pair2 {
    Profile f, h;
};

Pair2 axpy(const InterfaceState& X, double dt, std::initializer_list<std::pair<double, const Pair2*>> terms) {
    Pair2 out{X.f, X.h};
    for (const auto& [c, k] : terms) {
        const double cdt = c * dt;
        for (int j = 0; j < out.f.size(); ++j) {
            out.f[j] += cdt * k->f[j];
            out.h[j] += cdt * k->h[j];
        }
    }
    return out;
}

InterfaceState with_profiles(const InterfaceState& X, Pair2 p) {
    return InterfaceState(std::move(p.f), std::move(p.h), X.params);
}

}  // namespace

StepResult step(const InterfaceState& X, double t, double dt, const StepperConfig& config,
                StepController& ctl) {
    const int n = X.grid()->n_nodes;
    StepResult out{X, dt, {}};
    SimulationRecord& rec = out.record;
    rec.time = t;
    rec.dt = dt;

    SolveInfo info;
    Pair2 k1;
    VorticityDensity omega1;
    if (ctl.have_fsal) {
        k1 = {ctl.k1_f, ctl.k1_h};
        omega1 = ctl.omega;
        info.cond_estimate = ctl.cond_estimate;
    } else {
        auto [p1, p2] = compute_phi(X, &omega1, &info);
        k1 = {std::move(p1), std::move(p2)};
    }
    rec.cond_estimate = info.cond_estimate;

    auto eval = [&](const Pair2& y) {
        InterfaceState Xs = with_profiles(X, y);
        auto [p1, p2] = compute_phi(Xs);
        return Pair2{std::move(p1), std::move(p2)};
    };

    Pair2 k2 = eval(axpy(X, dt, {{kA21, &k1}}));
    Pair2 k3 = eval(axpy(X, dt, {{kA31, &k1}, {kA32, &k2}}));
    Pair2 k4 = eval(axpy(X, dt, {{kA41, &k1}, {kA42, &k2}, {kA43, &k3}}));
    Pair2 k5 = eval(axpy(X, dt, {{kA51, &k1}, {kA52, &k2}, {kA53, &k3}, {kA54, &k4}}));
    Pair2 k6 =
        eval(axpy(X, dt, {{kA61, &k1}, {kA62, &k2}, {kA63, &k3}, {kA64, &k4}, {kA65, &k5}}));

    Pair2 y5 = axpy(X, dt, {{kB1, &k1}, {kB3, &k3}, {kB4, &k4}, {kB5, &k5}, {kB6, &k6}});
    InterfaceState X5 = with_profiles(X, y5);

    // k7 = Phi(y5): reused as the next step's k1 on acceptance
    VorticityDensity omega7;
    SolveInfo info7;
    auto [k7f, k7h] = compute_phi(X5, &omega7, &info7);

    double err = 0.0;
    for (int j = 0; j < n; ++j) {
        const double ef = dt * (kE1 * k1.f[j] + kE3 * k3.f[j] + kE4 * k4.f[j] + kE5 * k5.f[j] +
                                kE6 * k6.f[j] + kE7 * k7f[j]);
        const double eh = dt * (kE1 * k1.h[j] + kE3 * k3.h[j] + kE4 * k4.h[j] + kE5 * k5.h[j] +
                                kE6 * k6.h[j] + kE7 * k7h[j]);
        const double sf = config.atol + config.rtol * std::max(std::abs(X.f[j]), std::abs(X5.f[j]));
        const double sh = config.atol + config.rtol * std::max(std::abs(X.h[j]), std::abs(X5.h[j]));
        err = std::max({err, std::abs(ef) / sf, std::abs(eh) / sh});
    }
    rec.error_estimate = err;
    rec.accepted = err <= 1.0;

    // PI step-size controller
    const double safety = 0.9, k_order = 5.0;
    double fac = safety * std::pow(std::max(err, 1e-16), -0.7 / k_order) *
                 std::pow(std::max(ctl.err_prev, 1e-16), 0.4 / k_order);
    fac = std::clamp(fac, 0.2, 5.0);
    double dt_next = dt * fac;

    const InterfaceState& Xr = rec.accepted ? X5 : X;
    auto [r1, r2] = rayleigh_taylor_from_phi(
        Xr, rec.accepted ? k7f : k1.f, rec.accepted ? k7h : k1.h);
    double rmax1 = -std::numeric_limits<double>::infinity();
    double rmax2 = rmax1;
    for (int j = 0; j < n; ++j) {
        rmax1 = std::max(rmax1, r1[j]);
        rmax2 = std::max(rmax2, r2[j]);
    }
    rec.rt1_max = rmax1;
    rec.rt2_max = rmax2;

    // transport stability ceiling from the local decay rates
    const double rlim = std::max({std::abs(rmax1), std::abs(rmax2), 1e-14});
    dt_next = std::min(dt_next, config.cfl_safety * X.grid()->dx / rlim);
    dt_next = std::clamp(dt_next, config.dt_min, config.dt_max);
    out.dt_next = dt_next;

    rec.gap = Xr.gap();
    rec.mass_f = integrate(Xr.f);
    rec.mass_h = integrate(Xr.h);
    rec.f_inf = Xr.f.max_abs();
    rec.h_inf = Xr.h.max_abs();

    if (rec.accepted) {
        ctl.err_prev = std::max(err, 1e-16);
        ctl.have_fsal = true;
        ctl.k1_f = std::move(k7f);
        ctl.k1_h = std::move(k7h);
        ctl.omega = std::move(omega7);
        ctl.cond_estimate = info7.cond_estimate;
        out.state = std::move(X5);
    }
    return out;
}

SimulationResult simulate(const InterfaceState& X0, const StepperConfig& config,
                          const SimulateOptions& opts) {
    config.validate();
    X0.validate();

    SimulationResult result;
    InterfaceState X = X0;
    double t = opts.t_start;
    double dt = opts.dt_init_override > 0.0 ? opts.dt_init_override : config.dt_init;
    StepController ctl;
    ctl.err_prev = opts.err_prev_init;
    long steps = opts.step_offset;
    int accepted_since_snapshot = 0;
    int accepted_since_monitor = 0;

    const double gap_min = config.gap_min_rel * X.params.c_inf;

    auto push_record = [&](SimulationRecord rec) {
        rec.step = steps;
        if (opts.monitor_mode > 0) rec.mode_amp_f = mode_amplitude(X.f, opts.monitor_mode);
        if (opts.on_record) opts.on_record(rec);
        result.records.push_back(std::move(rec));
    };

    auto snapshot_now = [&](const StepController& c, double dt_next) {
        StateSnapshot snap;
        snap.step = steps;
        snap.time = t;
        snap.f = X.f;
        snap.h = X.h;
        if (c.have_fsal) {
            snap.w1 = c.omega.w1;
            snap.w2 = c.omega.w2;
        } else {
            VorticityDensity w = solve_omega(X);
            snap.w1 = w.w1;
            snap.w2 = w.w2;
        }
        snap.dt_next = dt_next;
        snap.err_prev = c.err_prev;
        result.snapshots.push_back(std::move(snap));
    };

    auto finish = [&](EventKind kind, const std::string& detail) {
        result.event = {kind, t, detail};
        result.final_state = X;
        result.final_time = t;
        snapshot_now(ctl, dt);
        return result;
    };

    // initial stability gate
    try {
        auto [r1, r2] = rayleigh_taylor(X);
        double m1 = -std::numeric_limits<double>::infinity(), m2 = m1;
        for (int j = 0; j < r1.size(); ++j) {
            m1 = std::max(m1, r1[j]);
            m2 = std::max(m2, r2[j]);
        }
        if (!config.rt_override && (m1 >= 0.0 || m2 >= 0.0))
            return finish(EventKind::RTViolation,
                          "initial state violates the stability sign condition");
    } catch (const InvertibilityFailure& e) {
        return finish(EventKind::InvertibilityFailure, e.what());
    }

    snapshot_now(ctl, dt);

    while (t < config.t_end && steps - opts.step_offset < config.max_steps) {
        dt = std::min(dt, config.t_end - t);
        StepResult res;
        try {
            res = step(X, t, dt, config, ctl);
        } catch (const InvertibilityFailure& e) {
            // a failed solve at a trial state: shrink the step before giving up
            if (dt > 4.0 * config.dt_min) {
                dt = std::max(config.dt_min, 0.25 * dt);
                continue;
            }
            return finish(EventKind::InvertibilityFailure, e.what());
        } catch (const InterfaceCollision&) {
            if (dt > 4.0 * config.dt_min) {
                dt = std::max(config.dt_min, 0.25 * dt);
                continue;
            }
            return finish(EventKind::Collision, "interfaces collided inside a trial stage");
        } catch (const WindowViolation& e) {
            return finish(EventKind::WindowViolation, e.what());
        }
        ++steps;

        if (res.record.accepted) {
            t += dt;
            X = std::move(res.state);
            res.record.time = t;
            push_record(res.record);

            if (res.record.gap <= gap_min)
                return finish(EventKind::Collision,
                              "gap " + std::to_string(res.record.gap) + " reached the floor " +
                                  std::to_string(gap_min));
            if (!config.rt_override && (res.record.rt1_max >= 0.0 || res.record.rt2_max >= 0.0))
                return finish(EventKind::RTViolation, "stability sign condition lost");

            if (++accepted_since_monitor >= config.monitor_every) {
                accepted_since_monitor = 0;
                if (!X.f.decayed() || !X.h.decayed())
                    return finish(EventKind::WindowViolation,
                                  "interface lost decay at the window edge (f edge " +
                                      std::to_string(X.f.edge_max()) + ", h edge " +
                                      std::to_string(X.h.edge_max()) + ")");
            }
            if (opts.snapshot_every > 0 && ++accepted_since_snapshot >= opts.snapshot_every) {
                accepted_since_snapshot = 0;
                snapshot_now(ctl, res.dt_next);
            }
        } else {
            push_record(res.record);
            if (res.dt_next <= config.dt_min && dt <= config.dt_min * (1.0 + 1e-12))
                return finish(EventKind::StiffnessFailure,
                              "step size underflow at the error-control floor");
        }
        dt = res.dt_next;
    }

    if (steps - opts.step_offset >= config.max_steps)
        return finish(EventKind::StiffnessFailure, "step budget exhausted");
    return finish(EventKind::ReachedTEnd, "");
}

}  // namespace muskat
