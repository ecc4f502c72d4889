#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "alpsim/categorical.hpp"
#include "alpsim/errors.hpp"
#include "alpsim/governance.hpp"
#include "alpsim/inference.hpp"
#include "alpsim/model.hpp"

namespace alpsim {

// Simulated autonomic summary state. `arousal` is the single physiological
// channel; `control_capacity` is the depletable reservoir backing effortful
// suppression; `relapse_flag` latches once the reservoir ever empties while
// suppression is needed.
struct AutonomicState {
    double arousal = 0.5;           // in [0, 1]
    double recovery_tau = 2.0;      // seconds, > 0
    double control_capacity = 1.0;  // in [0, 1]
    double control_effort = 0.0;    // instantaneous, >= 0
    bool relapse_flag = false;
};

struct StressEvent {
    double time = 0.0;       // onset, seconds
    double magnitude = 0.0;  // arousal forcing, 1/seconds
    double duration = 0.0;   // seconds
    int context_id = 0;
    bool identity_relevant = false;
};

// Transient stress-driven amplification; gain >= 1, never persisted into
// PrecisionState.
struct NeuromodulationState {
    double gain = 1.0;
};

struct ControlParams {
    double strength = 1.0;        // k: effort per unit arousal gap
    double depletion_rate = 0.05; // rho: capacity loss per unit effort-time
    double recovery_rate = 0.01;  // r: capacity regained per second when aligned
};

// First-order arousal dynamics toward the governing hypothesis's set-point,
//
//   da/dt = -(a - setpoint) / tau + stress_input
//
// integrated with one explicit Euler step and clamped to [0, 1]. Effort,
// capacity and the relapse flag are untouched here.
inline AutonomicState step_autonomic(AutonomicState state,
                                     const Hypothesis& governing,
                                     double stress_input, double dt) {
    if (!(dt > 0.0) || dt > state.recovery_tau / 10.0) {
        throw DomainError("step_autonomic: dt must satisfy 0 < dt <= tau/10 (dt=" +
                          std::to_string(dt) + ", tau=" +
                          std::to_string(state.recovery_tau) + ")");
    }
    const double drift =
        -(state.arousal - governing.autonomic_setpoint) / state.recovery_tau +
        stress_input;
    state.arousal = clamp01(state.arousal + dt * drift);
    return state;
}

// Effortful suppression of arousal toward the endorsed hypothesis's set-point.
// Alignment (endorsed == governing) costs nothing and lets the reservoir
// recover; misalignment drives a proportional controller that burns capacity
// until it empties, at which point effort collapses and the relapse flag
// latches.
inline AutonomicState compensatory_control(int endorsed_id, int governing_id,
                                           AutonomicState state,
                                           const HypothesisSpace& space,
                                           double dt,
                                           const ControlParams& params) {
    const Hypothesis& endorsed = space.hypothesis(endorsed_id);
    space.index_of(governing_id);  // validates the id

    if (endorsed_id == governing_id) {
        state.control_effort = 0.0;
        state.control_capacity =
            std::min(1.0, state.control_capacity + params.recovery_rate * dt);
        return state;
    }

    if (state.control_capacity > 0.0) {
        const double gap =
            std::max(0.0, state.arousal - endorsed.autonomic_setpoint);
        state.control_effort = params.strength * gap;
        state.arousal = clamp01(state.arousal - state.control_effort * dt);
        state.control_capacity = std::max(
            0.0, state.control_capacity -
                     params.depletion_rate * state.control_effort * dt);
        if (state.control_capacity == 0.0) state.relapse_flag = true;
    } else {
        state.control_effort = 0.0;
        state.relapse_flag = true;
    }
    return state;
}

// Effective precision table used for dominance resolution under stress: the
// gain multiplies authorized hypotheses' precision only. The stored
// PrecisionState is never modified; the amplification is transient, not
// learning. Unauthorized entries pass through untouched (dominance never
// reads them anyway).
inline std::vector<double> apply_neuromodulation(const NeuromodulationState& neuro,
                                                 const PrecisionState& precisions,
                                                 const GovernanceState& gov,
                                                 const HypothesisSpace& space) {
    if (!(neuro.gain >= 1.0))
        throw DomainError("apply_neuromodulation: gain must be >= 1");
    std::vector<double> effective = precisions.precision;
    for (int id : gov.authorized) {
        effective[static_cast<std::size_t>(space.index_of(id))] *= neuro.gain;
    }
    return effective;
}

}  // namespace alpsim
