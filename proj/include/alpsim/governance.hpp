#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <vector>

#include "alpsim/errors.hpp"
#include "alpsim/inference.hpp"
#include "alpsim/model.hpp"

namespace alpsim {

// Binary admissibility verdict. Deliberately two-valued: there is no graded
// authority anywhere in this layer.
enum class Authority { authorized, unauthorized };

struct ShiftEvent {
    double time = 0.0;
    int hypothesis_id = 0;
    bool authorized = true;  // true = authorize event, false = deauthorize
};

// The regulatory-admissibility layer: which hypotheses may govern, plus the
// time-ordered log of membership changes. Holds ids only: no posterior or
// precision value is ever stored or read here.
struct GovernanceState {
    std::set<int> authorized;
    std::vector<ShiftEvent> shift_log;
};

inline Authority c_auth(const GovernanceState& gov, const HypothesisSpace& space,
                        int hypothesis_id) {
    if (!space.contains(hypothesis_id)) throw UnknownHypothesisError(hypothesis_id);
    return gov.authorized.count(hypothesis_id) ? Authority::authorized
                                               : Authority::unauthorized;
}

namespace detail {

inline void check_shift_time(const GovernanceState& gov, double time) {
    if (!gov.shift_log.empty() && time < gov.shift_log.back().time) {
        throw DomainError("governance shift time going backwards");
    }
}

}  // namespace detail

// Membership changes are atomic and logged; they touch only the set. Both
// operations are idempotent on the set but always append a log entry.
inline GovernanceState authorize(GovernanceState gov, const HypothesisSpace& space,
                                 int hypothesis_id, double time) {
    if (!space.contains(hypothesis_id)) throw UnknownHypothesisError(hypothesis_id);
    detail::check_shift_time(gov, time);
    gov.authorized.insert(hypothesis_id);
    gov.shift_log.push_back({time, hypothesis_id, true});
    return gov;
}

inline GovernanceState deauthorize(GovernanceState gov,
                                   const HypothesisSpace& space,
                                   int hypothesis_id, double time,
                                   bool regulation_active = true) {
    if (!space.contains(hypothesis_id)) throw UnknownHypothesisError(hypothesis_id);
    detail::check_shift_time(gov, time);
    if (regulation_active && gov.authorized.size() == 1 &&
        gov.authorized.count(hypothesis_id)) {
        throw EmptyGovernanceError(
            "deauthorizing hypothesis " + std::to_string(hypothesis_id) +
            " would leave regulation without a governing hypothesis");
    }
    gov.authorized.erase(hypothesis_id);
    gov.shift_log.push_back({time, hypothesis_id, false});
    return gov;
}

// How dominance is scored inside the authorized set. The precision-weighted
// product is the default; posterior-only ignores precision entirely.
enum class DominanceRule { precision_weighted, posterior_only };

// Resolves the single governing hypothesis: the argmax of the dominance score
// (by default π_h · P(h | data)) restricted to the authorized set, ties
// broken by lowest id. Unauthorized hypotheses are never read, so their
// scores cannot influence the result.
inline int governing_hypothesis(
    const GovernanceState& gov, const HypothesisSpace& space,
    const BeliefState& beliefs, std::span<const double> precision,
    DominanceRule rule = DominanceRule::precision_weighted) {
    if (gov.authorized.empty())
        throw EmptyGovernanceError("governing_hypothesis: authorized set is empty");
    if (precision.size() != space.hypotheses.size() ||
        beliefs.hypothesis_posterior.size() != space.hypotheses.size()) {
        throw DimensionError(
            "governing_hypothesis: belief/precision sizes do not match the space");
    }

    int best_id = -1;
    double best_score = -1.0;
    for (int id : gov.authorized) {  // std::set iterates in ascending id order
        const auto i = static_cast<std::size_t>(space.index_of(id));
        const double score = rule == DominanceRule::precision_weighted
                                 ? precision[i] * beliefs.hypothesis_posterior[i]
                                 : beliefs.hypothesis_posterior[i];
        if (score > best_score) {
            best_score = score;
            best_id = id;
        }
    }
    return best_id;
}

inline int governing_hypothesis(
    const GovernanceState& gov, const HypothesisSpace& space,
    const BeliefState& beliefs, const PrecisionState& precisions,
    DominanceRule rule = DominanceRule::precision_weighted) {
    return governing_hypothesis(gov, space, beliefs,
                                std::span<const double>(precisions.precision),
                                rule);
}

}  // namespace alpsim
