#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "alpsim/categorical.hpp"
#include "alpsim/errors.hpp"
#include "alpsim/rng.hpp"

namespace alpsim {

// Row-major matrix of categorical rows: m[row] is a distribution.
using Matrix = std::vector<std::vector<double>>;

struct Observation {
    int index = 0;
    int context_id = 0;
    bool identity_relevant = false;
};

// One identity-level hypothesis with the full discrete generative model it
// induces: per-state observation likelihoods, per-action state transitions,
// log-preferences over observations, a prior over hidden states, the arousal
// baseline it predicts, and the ids of the policies it generates.
struct Hypothesis {
    int id = 0;
    std::string label;
    Matrix likelihood;                  // [state][observation]
    std::vector<Matrix> transition;     // [action][state][next state]
    std::vector<double> preferences;    // log-preference per observation
    Categorical state_prior;
    double autonomic_setpoint = 0.5;    // in [0, 1]
    std::vector<int> policy_repertoire; // non-empty

    int num_states() const { return static_cast<int>(likelihood.size()); }
    int num_observations() const {
        return likelihood.empty() ? 0 : static_cast<int>(likelihood[0].size());
    }
    int num_actions() const { return static_cast<int>(transition.size()); }
};

struct HypothesisSpace {
    int num_states = 0;
    int num_observations = 0;
    int num_actions = 0;
    std::vector<Hypothesis> hypotheses;

    int size() const { return static_cast<int>(hypotheses.size()); }

    bool contains(int id) const {
        for (const auto& h : hypotheses)
            if (h.id == id) return true;
        return false;
    }

    // Position of a hypothesis in storage order; posterior/precision vectors
    // elsewhere are indexed by this position, not by id.
    int index_of(int id) const {
        for (std::size_t i = 0; i < hypotheses.size(); ++i)
            if (hypotheses[i].id == id) return static_cast<int>(i);
        throw UnknownHypothesisError(id);
    }

    const Hypothesis& hypothesis(int id) const {
        return hypotheses[static_cast<std::size_t>(index_of(id))];
    }
};

struct Violation {
    std::string code;     // stable identifier, e.g. "likelihood_row_sum"
    int hypothesis_id;    // -1 for space-level violations
    std::string message;  // names the row/field and the observed value
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

namespace detail {

inline void check_row(ValidationReport& report, std::span<const double> row,
                      int h_id, const std::string& what) {
    double total = 0.0;
    for (double v : row) {
        if (!std::isfinite(v) || v < 0.0) {
            report.violations.push_back(
                {"negative_entry", h_id, what + " has a negative or non-finite entry"});
            return;
        }
        total += v;
    }
    if (std::abs(total - 1.0) > kDistributionTolerance) {
        report.violations.push_back(
            {"row_sum", h_id,
             what + " sums to " + std::to_string(total) + ", expected 1"});
    }
}

}  // namespace detail

// Report-style validation of the whole space: lists every violated invariant;
// an empty list means the model is valid. Never throws.
inline ValidationReport validate_model(const HypothesisSpace& space) {
    ValidationReport report;

    if (space.size() < 2) {
        report.violations.push_back(
            {"hypothesis_count", -1,
             "hypothesis space has " + std::to_string(space.size()) +
                 " hypotheses, need at least 2"});
    }
    for (std::size_t i = 0; i < space.hypotheses.size(); ++i) {
        for (std::size_t j = i + 1; j < space.hypotheses.size(); ++j) {
            if (space.hypotheses[i].id == space.hypotheses[j].id) {
                report.violations.push_back(
                    {"duplicate_id", space.hypotheses[i].id,
                     "hypothesis id appears more than once"});
            }
        }
    }

    for (const auto& h : space.hypotheses) {
        const std::string tag = "hypothesis " + std::to_string(h.id);

        if (h.num_states() != space.num_states) {
            report.violations.push_back(
                {"likelihood_shape", h.id,
                 tag + " likelihood has " + std::to_string(h.num_states()) +
                     " rows, expected " + std::to_string(space.num_states)});
        }
        for (std::size_t s = 0; s < h.likelihood.size(); ++s) {
            if (static_cast<int>(h.likelihood[s].size()) != space.num_observations) {
                report.violations.push_back(
                    {"likelihood_shape", h.id,
                     tag + " likelihood row " + std::to_string(s) + " has " +
                         std::to_string(h.likelihood[s].size()) +
                         " columns, expected " +
                         std::to_string(space.num_observations)});
                continue;
            }
            detail::check_row(report, h.likelihood[s], h.id,
                              tag + " likelihood row " + std::to_string(s));
        }

        if (h.num_actions() != space.num_actions) {
            report.violations.push_back(
                {"transition_shape", h.id,
                 tag + " has " + std::to_string(h.num_actions()) +
                     " transition matrices, expected " +
                     std::to_string(space.num_actions)});
        }
        for (std::size_t a = 0; a < h.transition.size(); ++a) {
            const auto& b = h.transition[a];
            if (static_cast<int>(b.size()) != space.num_states) {
                report.violations.push_back(
                    {"transition_shape", h.id,
                     tag + " transition " + std::to_string(a) + " has " +
                         std::to_string(b.size()) + " rows, expected " +
                         std::to_string(space.num_states)});
                continue;
            }
            for (std::size_t s = 0; s < b.size(); ++s) {
                if (static_cast<int>(b[s].size()) != space.num_states) {
                    report.violations.push_back(
                        {"transition_shape", h.id,
                         tag + " transition " + std::to_string(a) + " row " +
                             std::to_string(s) + " has wrong length"});
                    continue;
                }
                detail::check_row(report, b[s], h.id,
                                  tag + " transition " + std::to_string(a) +
                                      " row " + std::to_string(s));
            }
        }

        if (static_cast<int>(h.preferences.size()) != space.num_observations) {
            report.violations.push_back(
                {"preference_shape", h.id,
                 tag + " preferences have wrong length"});
        }
        for (double c : h.preferences) {
            if (!std::isfinite(c)) {
                report.violations.push_back(
                    {"preference_value", h.id, tag + " has a non-finite preference"});
                break;
            }
        }

        if (static_cast<int>(h.state_prior.size()) != space.num_states) {
            report.violations.push_back(
                {"state_prior_shape", h.id, tag + " state prior has wrong length"});
        } else {
            detail::check_row(report, h.state_prior, h.id, tag + " state prior");
        }

        if (!(h.autonomic_setpoint >= 0.0 && h.autonomic_setpoint <= 1.0)) {
            report.violations.push_back(
                {"setpoint_range", h.id,
                 tag + " autonomic set-point " +
                     std::to_string(h.autonomic_setpoint) + " outside [0, 1]"});
        }

        if (h.policy_repertoire.empty()) {
            report.violations.push_back(
                {"empty_repertoire", h.id, tag + " has an empty policy repertoire"});
        }
    }
    return report;
}

// Draws an observation from the environment hypothesis's likelihood row for
// the true hidden state. Deterministic given the rng state.
inline Observation sample_observation(int true_state,
                                      const Hypothesis& environment, Rng& rng,
                                      int context_id = 0,
                                      bool identity_relevant = false) {
    if (true_state < 0 || true_state >= environment.num_states()) {
        throw DomainError("sample_observation: state index " +
                          std::to_string(true_state) + " out of range");
    }
    const auto& row = environment.likelihood[static_cast<std::size_t>(true_state)];
    return Observation{rng.categorical(row), context_id, identity_relevant};
}

}  // namespace alpsim
