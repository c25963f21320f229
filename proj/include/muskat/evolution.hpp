#pragma once

#include <functional>
#include <string>
#include <vector>

#include "muskat/bie.hpp"

namespace muskat {

/// Adaptive stepper controls. The pair (dt, error controller) advances
/// d/dt (f, h) = Phi(f, h) with an embedded 5(4) Runge-Kutta pair under a
/// transport stability ceiling dt <= cfl_safety * dx / max|R_i|.
struct StepperConfig {
    double t_end = 1.0;
    double rtol = 1e-8;
    double atol = 1e-10;
    double cfl_safety = 0.5;   // in (0, 1]
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 1.0;
    int monitor_every = 10;    // accepted steps between window/decay re-checks
    double gap_min_rel = 1e-3; // collision threshold as a fraction of c_inf
    bool rt_override = false;  // disables the stability gate and event
    long max_steps = 1000000;

    void validate() const;
};

/// Per-attempt diagnostics; one record per attempted step.
struct SimulationRecord {
    long step = 0;
    double time = 0.0;
    double dt = 0.0;
    bool accepted = false;
    double error_estimate = 0.0;  // scaled embedded-error ratio (accept iff <= 1)
    double rt1_max = 0.0;
    double rt2_max = 0.0;
    double gap = 0.0;
    double mass_f = 0.0;
    double mass_h = 0.0;
    double f_inf = 0.0;
    double h_inf = 0.0;
    double cond_estimate = 0.0;
    double mode_amp_f = 0.0;  // amplitude of the monitored f mode (0 when unset)
};

enum class EventKind {
    ReachedTEnd,
    RTViolation,
    Collision,
    WindowViolation,
    InvertibilityFailure,
    StiffnessFailure,
};

const char* event_name(EventKind kind);
int event_exit_code(EventKind kind);  // 0, 10, 11, 12, 13, 14

struct TerminationEvent {
    EventKind kind = EventKind::ReachedTEnd;
    double time = 0.0;
    std::string detail;
};

/// Interface velocity Phi(X); solver failures propagate as exceptions for the
/// stepper to treat as rejection/termination signals.
std::pair<Profile, Profile> rhs(const InterfaceState& X);

/// Error-controller memory carried between steps (PI controller + first-same-
/// as-last reuse of the final stage).
struct StepController {
    double err_prev = 1.0;
    bool have_fsal = false;
    Profile k1_f, k1_h;       // Phi at the current state when have_fsal
    VorticityDensity omega;   // density at the current state when have_fsal
    double cond_estimate = 0.0;
};

struct StepResult {
    InterfaceState state;   // updated on acceptance, input state otherwise
    double dt_next = 0.0;
    SimulationRecord record;
};

/// One attempted step of the embedded pair. Throws the solver's exceptions
/// through; the caller decides whether they terminate or shrink dt.
StepResult step(const InterfaceState& X, double t, double dt, const StepperConfig& config,
                StepController& ctl);

struct StateSnapshot {
    long step = 0;
    double time = 0.0;
    Profile f, h, w1, w2;
    double dt_next = 0.0;
    double err_prev = 1.0;
};

struct SimulationResult {
    std::vector<StateSnapshot> snapshots;
    std::vector<SimulationRecord> records;
    TerminationEvent event;
    InterfaceState final_state;
    double final_time = 0.0;
};

struct SimulateOptions {
    int snapshot_every = 0;  // accepted steps between snapshots; 0 = endpoints only
    int monitor_mode = 0;    // f mode whose amplitude is recorded (0 = none)
    std::function<void(const SimulationRecord&)> on_record;

    // resume support: start the controller from a stored state
    double dt_init_override = 0.0;
    double err_prev_init = 1.0;
    long step_offset = 0;
    double t_start = 0.0;
};

/// Advances X0 until t_end or a termination event. All failures become
/// events, not exceptions.
SimulationResult simulate(const InterfaceState& X0, const StepperConfig& config,
                          const SimulateOptions& opts = {});

}  // namespace muskat
