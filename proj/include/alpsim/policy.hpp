#pragma once

#include <span>
#include <vector>

#include "alpsim/categorical.hpp"
#include "alpsim/errors.hpp"
#include "alpsim/governance.hpp"
#include "alpsim/inference.hpp"
#include "alpsim/model.hpp"
#include "alpsim/rng.hpp"

namespace alpsim {

// A fixed-length action sequence tagged with the hypothesis that generated it.
struct Policy {
    int id = 0;
    std::vector<int> actions;
    int generated_by = 0;
};

struct PolicyEvaluation {
    int policy_id = 0;
    double expected_free_energy = 0.0;  // risk + ambiguity, nats
    double risk = 0.0;
    double ambiguity = 0.0;
    bool admissible = true;
    bool selected = false;
};

// Expected free energy of one policy under its hypothesis's generative model:
// the predicted state distribution is rolled forward through B_h(action) one
// step per action, and each step contributes
//
//   risk      += KL(predicted outcomes ‖ softmax(C_h))
//   ambiguity += Σ_s q(s) · H(A_h(s, ·))
//
// Preferences are converted to a distribution via softmax so the KL term is
// always well defined.
inline PolicyEvaluation expected_free_energy(const Policy& policy,
                                             const Hypothesis& h,
                                             const Categorical& state_belief) {
    if (policy.actions.empty())
        throw DomainError("expected_free_energy: policy has no actions");
    if (static_cast<int>(state_belief.size()) != h.num_states())
        throw DimensionError("expected_free_energy: state belief length");

    const Categorical preferred = softmax(h.preferences);

    PolicyEvaluation eval;
    eval.policy_id = policy.id;

    Categorical state = state_belief;
    for (int action : policy.actions) {
        if (action < 0 || action >= h.num_actions()) {
            throw DimensionError(
                "expected_free_energy: action " + std::to_string(action) +
                " has no transition matrix in hypothesis " + std::to_string(h.id));
        }
        const Matrix& b = h.transition[static_cast<std::size_t>(action)];

        Categorical next(state.size(), 0.0);
        for (std::size_t s = 0; s < state.size(); ++s)
            for (std::size_t s2 = 0; s2 < next.size(); ++s2)
                next[s2] += state[s] * b[s][s2];

        Categorical outcome(static_cast<std::size_t>(h.num_observations()), 0.0);
        double step_ambiguity = 0.0;
        for (std::size_t s = 0; s < next.size(); ++s) {
            for (std::size_t o = 0; o < outcome.size(); ++o)
                outcome[o] += next[s] * h.likelihood[s][o];
            step_ambiguity += next[s] * entropy(h.likelihood[s]);
        }

        eval.risk += kl_divergence(outcome, preferred);
        eval.ambiguity += step_ambiguity;
        state = std::move(next);
    }
    eval.expected_free_energy = eval.risk + eval.ambiguity;
    return eval;
}

enum class SelectionMode { argmin, softmax };

struct SelectionOptions {
    SelectionMode mode = SelectionMode::argmin;
    double gamma = 16.0;  // inverse temperature for softmax mode
    Rng* rng = nullptr;   // required in softmax mode
};

struct SelectionResult {
    int policy_id = -1;
    std::vector<PolicyEvaluation> table;  // one row per input policy, in order
};

namespace detail {

// Deterministic argmin with lowest-id tie break over the rows where
// candidate(row) is true; softmax mode samples from softmax(-gamma * G) over
// the same rows.
inline int pick(const std::vector<PolicyEvaluation>& table,
                const std::vector<char>& candidate, const SelectionOptions& options) {
    int best = -1;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!candidate[i]) continue;
        if (best < 0 ||
            table[i].expected_free_energy < table[static_cast<std::size_t>(best)].expected_free_energy ||
            (table[i].expected_free_energy == table[static_cast<std::size_t>(best)].expected_free_energy &&
             table[i].policy_id < table[static_cast<std::size_t>(best)].policy_id)) {
            best = static_cast<int>(i);
        }
    }

    if (options.mode == SelectionMode::softmax) {
        if (options.rng == nullptr)
            throw DomainError("softmax policy selection needs an rng");
        std::vector<double> logits;
        std::vector<int> rows;
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (!candidate[i]) continue;
            logits.push_back(-options.gamma * table[i].expected_free_energy);
            rows.push_back(static_cast<int>(i));
        }
        const Categorical probs = softmax(logits);
        return rows[static_cast<std::size_t>(options.rng->categorical(probs))];
    }
    return best;
}

inline std::vector<PolicyEvaluation> evaluate_all(std::span<const Policy> policies,
                                                  const HypothesisSpace& space,
                                                  const BeliefState& beliefs) {
    std::vector<PolicyEvaluation> table;
    table.reserve(policies.size());
    for (const Policy& p : policies) {
        const int i = space.index_of(p.generated_by);
        table.push_back(expected_free_energy(
            p, space.hypotheses[static_cast<std::size_t>(i)],
            beliefs.state_posteriors[static_cast<std::size_t>(i)]));
    }
    return table;
}

}  // namespace detail

// Unconstrained selection: argmin of expected free energy over every policy.
inline SelectionResult select_policy_standard(std::span<const Policy> policies,
                                              const HypothesisSpace& space,
                                              const BeliefState& beliefs,
                                              const SelectionOptions& options = {}) {
    if (policies.empty()) throw EmptyPolicySetError();

    SelectionResult result;
    result.table = detail::evaluate_all(policies, space, beliefs);
    std::vector<char> candidate(policies.size(), 1);
    const int row = detail::pick(result.table, candidate, options);
    result.table[static_cast<std::size_t>(row)].selected = true;
    result.policy_id = result.table[static_cast<std::size_t>(row)].policy_id;
    return result;
}

// Authority-constrained selection: the argmin runs only over policies whose
// generating hypothesis is authorized. Inadmissible policies are still
// evaluated and reported (flagged, never returnable) so callers can see
// excluded policies' scores.
inline SelectionResult select_policy_alp(std::span<const Policy> policies,
                                         const GovernanceState& gov,
                                         const HypothesisSpace& space,
                                         const BeliefState& beliefs,
                                         const SelectionOptions& options = {}) {
    if (policies.empty()) throw EmptyPolicySetError();

    SelectionResult result;
    result.table = detail::evaluate_all(policies, space, beliefs);
    std::vector<char> candidate(policies.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < policies.size(); ++i) {
        const bool ok =
            c_auth(gov, space, policies[i].generated_by) == Authority::authorized;
        result.table[i].admissible = ok;
        candidate[i] = ok;
        any = any || ok;
    }
    if (!any) throw EmptyAdmissiblePolicyError();

    const int row = detail::pick(result.table, candidate, options);
    result.table[static_cast<std::size_t>(row)].selected = true;
    result.policy_id = result.table[static_cast<std::size_t>(row)].policy_id;
    return result;
}

}  // namespace alpsim
