#pragma once

// Shared model builders for the test suites.

#include <cstdint>
#include <string>
#include <vector>

#include "alpsim/inference.hpp"
#include "alpsim/model.hpp"
#include "alpsim/policy.hpp"
#include "alpsim/rng.hpp"

namespace fixtures {

inline alpsim::Hypothesis make_hypothesis(int id, std::string label,
                                          alpsim::Matrix likelihood,
                                          std::vector<alpsim::Matrix> transition,
                                          std::vector<double> preferences,
                                          alpsim::Categorical state_prior,
                                          double setpoint,
                                          std::vector<int> repertoire) {
    alpsim::Hypothesis h;
    h.id = id;
    h.label = std::move(label);
    h.likelihood = std::move(likelihood);
    h.transition = std::move(transition);
    h.preferences = std::move(preferences);
    h.state_prior = std::move(state_prior);
    h.autonomic_setpoint = setpoint;
    h.policy_repertoire = std::move(repertoire);
    return h;
}

// The two-hypothesis running pair: a "safe" hypothesis expecting benign cues
// with a low arousal baseline, and a "threat" hypothesis expecting threat
// cues with a high one. 2 states, 2 observations, 2 actions.
inline alpsim::HypothesisSpace two_hypothesis_space() {
    alpsim::HypothesisSpace space;
    space.num_states = 2;
    space.num_observations = 2;
    space.num_actions = 2;

    space.hypotheses.push_back(make_hypothesis(
        0, "h_safe",
        {{0.85, 0.15}, {0.6, 0.4}},
        {{{0.9, 0.1}, {0.7, 0.3}}, {{0.6, 0.4}, {0.3, 0.7}}},
        {2.0, 0.0},
        {0.7, 0.3},
        0.2,
        {0, 1}));
    space.hypotheses.push_back(make_hypothesis(
        1, "h_threat",
        {{0.5, 0.5}, {0.2, 0.8}},
        {{{0.8, 0.2}, {0.5, 0.5}}, {{0.4, 0.6}, {0.1, 0.9}}},
        {0.0, 1.0},
        {0.3, 0.7},
        0.65,
        {2, 3}));
    return space;
}

inline std::vector<alpsim::Policy> two_hypothesis_policies() {
    return {
        {0, {0}, 0},
        {1, {1, 0}, 0},
        {2, {1}, 1},
        {3, {0, 1}, 1},
    };
}

// Random categorical with strictly positive entries (coarse 3-digit values,
// so comparisons in derived argmax tests never sit at rounding scale).
inline alpsim::Categorical random_distribution(alpsim::Rng& rng, int n) {
    alpsim::Categorical p(static_cast<std::size_t>(n));
    double total = 0.0;
    for (double& v : p) {
        v = 0.05 + std::floor(rng.uniform() * 1000.0) / 1000.0;
        total += v;
    }
    for (double& v : p) v /= total;
    return p;
}

inline alpsim::Matrix random_row_stochastic(alpsim::Rng& rng, int rows, int cols) {
    alpsim::Matrix m;
    m.reserve(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) m.push_back(random_distribution(rng, cols));
    return m;
}

// Randomized hypothesis space with full-support distributions everywhere.
inline alpsim::HypothesisSpace random_space(alpsim::Rng& rng, int num_hypotheses,
                                            int num_states, int num_observations,
                                            int num_actions) {
    alpsim::HypothesisSpace space;
    space.num_states = num_states;
    space.num_observations = num_observations;
    space.num_actions = num_actions;
    for (int i = 0; i < num_hypotheses; ++i) {
        alpsim::Hypothesis h;
        h.id = i;
        h.label = "h" + std::to_string(i);
        h.likelihood = random_row_stochastic(rng, num_states, num_observations);
        for (int a = 0; a < num_actions; ++a)
            h.transition.push_back(random_row_stochastic(rng, num_states, num_states));
        for (int o = 0; o < num_observations; ++o)
            h.preferences.push_back(2.0 * rng.uniform() - 1.0);
        h.state_prior = random_distribution(rng, num_states);
        h.autonomic_setpoint = 0.1 + 0.8 * rng.uniform();
        h.policy_repertoire = {i};  // placeholder; policy tests build their own
        space.hypotheses.push_back(std::move(h));
    }
    return space;
}

inline alpsim::BeliefState random_beliefs(alpsim::Rng& rng,
                                          const alpsim::HypothesisSpace& space) {
    alpsim::BeliefState b;
    b.hypothesis_posterior = random_distribution(rng, space.size());
    for (const auto& h : space.hypotheses) {
        (void)h;
        b.state_posteriors.push_back(random_distribution(rng, space.num_states));
    }
    return b;
}

inline alpsim::PrecisionState random_precisions(alpsim::Rng& rng, int n) {
    alpsim::PrecisionState p;
    for (int i = 0; i < n; ++i)
        p.precision.push_back(0.25 + std::floor(rng.uniform() * 775.0) / 100.0);
    return p;
}

}  // namespace fixtures
