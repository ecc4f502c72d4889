#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "alpsim/categorical.hpp"
#include "alpsim/errors.hpp"
#include "alpsim/model.hpp"

namespace alpsim {

// Posterior over hypotheses plus, per hypothesis, a posterior over that
// hypothesis's hidden states. All vectors are indexed by storage position in
// the HypothesisSpace.
struct BeliefState {
    Categorical hypothesis_posterior;
    std::vector<Categorical> state_posteriors;
};

struct PrecisionState {
    std::vector<double> precision;  // per hypothesis, storage order
    double min_precision = 0.0;
    double max_precision = 8.0;

    double clamp(double value) const {
        return std::clamp(value, min_precision, max_precision);
    }
};

inline BeliefState initial_beliefs(const HypothesisSpace& space,
                                   Categorical hypothesis_prior) {
    BeliefState b;
    b.hypothesis_posterior = std::move(hypothesis_prior);
    b.state_posteriors.reserve(space.hypotheses.size());
    for (const auto& h : space.hypotheses) b.state_posteriors.push_back(h.state_prior);
    return b;
}

// Precision-weighted state inference within one hypothesis: the likelihood
// column for the realized observation is tempered by the hypothesis's
// precision before the Bayes product,
//
//   posterior(s) ∝ prior(s) · A(s, o)^π
//
// so π = 0 disables the evidence entirely and larger π sharpens it.
inline Categorical infer_states(const Observation& obs, const Hypothesis& h,
                                double precision, const Categorical& prior) {
    if (obs.index < 0 || obs.index >= h.num_observations())
        throw DomainError("infer_states: observation index out of range");
    if (!(precision >= 0.0) || !std::isfinite(precision))
        throw DomainError("infer_states: precision must be finite and >= 0");
    if (static_cast<int>(prior.size()) != h.num_states())
        throw DimensionError("infer_states: prior length != number of states");

    Categorical post(prior.size());
    for (std::size_t s = 0; s < prior.size(); ++s) {
        post[s] = prior[s] *
                  std::pow(h.likelihood[s][static_cast<std::size_t>(obs.index)],
                           precision);
    }
    const double total = sum(post);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DegenerateEvidenceError(
            "infer_states: prior and likelihood have disjoint support");
    }
    for (double& v : post) v /= total;
    return post;
}

// Precision-tempered marginal likelihood of an observation under one
// hypothesis's current state belief: Σ_s b(s) · A(s, o)^π. Tempering the
// marginal with the same exponent used in infer_states makes a chain of
// sequential updates telescope exactly to one-shot Bayes over the whole
// observation sequence.
inline double marginal_likelihood(const Observation& obs, const Hypothesis& h,
                                  double precision,
                                  const Categorical& state_belief) {
    if (obs.index < 0 || obs.index >= h.num_observations())
        throw DomainError("marginal_likelihood: observation index out of range");
    double m = 0.0;
    for (std::size_t s = 0; s < state_belief.size(); ++s) {
        m += state_belief[s] *
             std::pow(h.likelihood[s][static_cast<std::size_t>(obs.index)],
                      precision);
    }
    return m;
}

// How well the hypothesis predicted the realized observation, in [0, 1]:
// its tempered marginal for that observation divided by the largest tempered
// marginal it assigns to any observation. The normalizer is local to the
// hypothesis, so one hypothesis's fit never depends on another's parameters.
inline double evidence_fit(const Observation& obs, const Hypothesis& h,
                           double precision, const Categorical& state_belief) {
    const double m = marginal_likelihood(obs, h, precision, state_belief);
    double best = 0.0;
    for (int o = 0; o < h.num_observations(); ++o) {
        best = std::max(best,
                        marginal_likelihood(Observation{o}, h, precision,
                                            state_belief));
    }
    if (best < kEvidenceFloor) return 0.0;  // numerically extinct hypothesis
    return std::clamp(m / best, 0.0, 1.0);
}

// Bayes over hypotheses using each hypothesis's tempered marginal likelihood
// of the observation; state posteriors are refreshed per hypothesis via
// infer_states. A hypothesis whose marginal underflows keeps its previous
// state posterior and drops to zero posterior mass; the update only fails
// when every hypothesis is numerically extinct.
inline BeliefState update_hypothesis_posterior(const BeliefState& beliefs,
                                               const Observation& obs,
                                               const HypothesisSpace& space,
                                               const PrecisionState& precisions) {
    const std::size_t n = space.hypotheses.size();
    if (beliefs.hypothesis_posterior.size() != n ||
        beliefs.state_posteriors.size() != n ||
        precisions.precision.size() != n) {
        throw DimensionError(
            "update_hypothesis_posterior: belief/precision sizes do not match "
            "the hypothesis space");
    }

    std::vector<double> log_marginal(n);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double m = marginal_likelihood(obs, space.hypotheses[i],
                                             precisions.precision[i],
                                             beliefs.state_posteriors[i]);
        log_marginal[i] = m > 0.0 ? std::log(m)
                                  : -std::numeric_limits<double>::infinity();
        if (beliefs.hypothesis_posterior[i] > 0.0)
            max_log = std::max(max_log, log_marginal[i]);
    }
    if (max_log < std::log(kEvidenceFloor)) {
        throw DegenerateEvidenceError(
            "update_hypothesis_posterior: every hypothesis assigns "
            "(numerically) zero likelihood to the observation");
    }

    BeliefState next;
    next.hypothesis_posterior.resize(n);
    next.state_posteriors.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool extinct = !std::isfinite(log_marginal[i]);
        next.hypothesis_posterior[i] =
            extinct ? 0.0
                    : beliefs.hypothesis_posterior[i] *
                          std::exp(log_marginal[i] - max_log);
        next.state_posteriors[i] =
            extinct ? beliefs.state_posteriors[i]
                    : infer_states(obs, space.hypotheses[i],
                                   precisions.precision[i],
                                   beliefs.state_posteriors[i]);
    }
    normalize(next.hypothesis_posterior);
    return next;
}

// Continuous multiplicative precision dynamics:
//
//   π ← clamp(π · exp(rate · (fit − 0.5)), π_min, π_max)
//
// fit = 0.5 is neutral; confirming evidence grows precision, disconfirming
// evidence shrinks it. Other hypotheses' precisions are untouched.
inline PrecisionState update_precision(const PrecisionState& precisions,
                                       const HypothesisSpace& space,
                                       int hypothesis_id, double fit,
                                       double rate) {
    if (!(fit >= 0.0 && fit <= 1.0))
        throw DomainError("update_precision: evidence fit outside [0, 1]");
    if (!(rate > 0.0)) throw DomainError("update_precision: rate must be > 0");
    const int i = space.index_of(hypothesis_id);

    PrecisionState next = precisions;
    next.precision[static_cast<std::size_t>(i)] = next.clamp(
        next.precision[static_cast<std::size_t>(i)] *
        std::exp(rate * (fit - 0.5)));
    return next;
}

}  // namespace alpsim
