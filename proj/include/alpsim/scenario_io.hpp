#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "alpsim/errors.hpp"
#include "alpsim/scenario.hpp"

namespace alpsim {

inline constexpr int kScenarioFormatVersion = 1;

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace io_detail {

inline void check_keys(const Json& j, const std::string& pointer,
                       const std::set<std::string>& allowed, bool strict,
                       std::vector<std::string>* warnings) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (allowed.count(key)) continue;
        const std::string what = "unknown key \"" + key + "\"";
        if (strict) throw ScenarioError(what, pointer.empty() ? "/" : pointer);
        if (warnings)
            warnings->push_back(what + " at " + (pointer.empty() ? "/" : pointer));
    }
}

inline const Json& require(const Json& j, const std::string& pointer,
                           const std::string& key) {
    if (!j.is_object() || !j.contains(key))
        throw ScenarioError("missing key \"" + key + "\"",
                            pointer.empty() ? "/" : pointer);
    return j.at(key);
}

inline double number(const Json& j, const std::string& pointer) {
    if (!j.is_number())
        throw ScenarioError("expected a number", pointer);
    return j.get<double>();
}

inline int integer(const Json& j, const std::string& pointer) {
    if (!j.is_number_integer())
        throw ScenarioError("expected an integer", pointer);
    return j.get<int>();
}

inline bool boolean(const Json& j, const std::string& pointer) {
    if (!j.is_boolean()) throw ScenarioError("expected a boolean", pointer);
    return j.get<bool>();
}

inline std::string text(const Json& j, const std::string& pointer) {
    if (!j.is_string()) throw ScenarioError("expected a string", pointer);
    return j.get<std::string>();
}

inline std::vector<double> number_array(const Json& j, const std::string& pointer) {
    if (!j.is_array()) throw ScenarioError("expected an array of numbers", pointer);
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number(j[i], pointer + "/" + std::to_string(i)));
    return out;
}

inline Matrix matrix(const Json& j, const std::string& pointer) {
    if (!j.is_array()) throw ScenarioError("expected an array of rows", pointer);
    Matrix out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number_array(j[i], pointer + "/" + std::to_string(i)));
    return out;
}

}  // namespace io_detail

// Parses the structural layer of a scenario document: types, shapes and key
// sets (unknown keys are rejected in strict mode, collected as warnings in
// lenient mode). Semantic validation is a separate step.
inline Scenario parse_scenario_document(const Json& doc, bool strict = true,
                                        std::vector<std::string>* warnings = nullptr) {
    using namespace io_detail;
    if (!doc.is_object()) throw ScenarioError("scenario document must be an object");

    check_keys(doc, "",
               {"version", "id", "seed", "horizon", "endorsed", "params", "space",
                "policies", "initial", "selection", "governing_rule",
                "dominance_rule", "timeline"},
               strict, warnings);

    const int version = integer(require(doc, "", "version"), "/version");
    if (version != kScenarioFormatVersion)
        throw ScenarioError("unsupported scenario format version " +
                                std::to_string(version) + ", expected " +
                                std::to_string(kScenarioFormatVersion),
                            "/version");

    Scenario s;
    s.id = text(require(doc, "", "id"), "/id");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            throw ScenarioError("expected an unsigned integer", "/seed");
        s.seed = doc["seed"].get<std::uint64_t>();
    }
    s.horizon = number(require(doc, "", "horizon"), "/horizon");
    s.endorsed = integer(require(doc, "", "endorsed"), "/endorsed");

    {
        const Json& p = require(doc, "", "params");
        check_keys(p, "/params",
                   {"dt", "recovery_tau", "control_strength",
                    "control_depletion_rate", "control_recovery_rate",
                    "precision_rate"},
                   strict, warnings);
        s.params.dt = number(require(p, "/params", "dt"), "/params/dt");
        s.params.recovery_tau =
            number(require(p, "/params", "recovery_tau"), "/params/recovery_tau");
        s.params.control.strength = number(
            require(p, "/params", "control_strength"), "/params/control_strength");
        s.params.control.depletion_rate =
            number(require(p, "/params", "control_depletion_rate"),
                   "/params/control_depletion_rate");
        s.params.control.recovery_rate =
            number(require(p, "/params", "control_recovery_rate"),
                   "/params/control_recovery_rate");
        if (p.contains("precision_rate"))
            s.params.precision_rate =
                number(p["precision_rate"], "/params/precision_rate");
    }

    {
        const Json& sp = require(doc, "", "space");
        check_keys(sp, "/space", {"states", "observations", "actions", "hypotheses"},
                   strict, warnings);
        s.space.num_states = integer(require(sp, "/space", "states"), "/space/states");
        s.space.num_observations =
            integer(require(sp, "/space", "observations"), "/space/observations");
        s.space.num_actions =
            integer(require(sp, "/space", "actions"), "/space/actions");
        const Json& hs = require(sp, "/space", "hypotheses");
        if (!hs.is_array())
            throw ScenarioError("expected an array", "/space/hypotheses");
        for (std::size_t i = 0; i < hs.size(); ++i) {
            const std::string ptr = "/space/hypotheses/" + std::to_string(i);
            const Json& hj = hs[i];
            check_keys(hj, ptr,
                       {"id", "label", "likelihood", "transition", "preferences",
                        "state_prior", "autonomic_setpoint", "policy_repertoire"},
                       strict, warnings);
            Hypothesis h;
            h.id = integer(require(hj, ptr, "id"), ptr + "/id");
            h.label = text(require(hj, ptr, "label"), ptr + "/label");
            h.likelihood = matrix(require(hj, ptr, "likelihood"), ptr + "/likelihood");
            const Json& tj = require(hj, ptr, "transition");
            if (!tj.is_array())
                throw ScenarioError("expected an array of matrices", ptr + "/transition");
            for (std::size_t a = 0; a < tj.size(); ++a)
                h.transition.push_back(
                    matrix(tj[a], ptr + "/transition/" + std::to_string(a)));
            h.preferences =
                number_array(require(hj, ptr, "preferences"), ptr + "/preferences");
            h.state_prior =
                number_array(require(hj, ptr, "state_prior"), ptr + "/state_prior");
            h.autonomic_setpoint = number(require(hj, ptr, "autonomic_setpoint"),
                                          ptr + "/autonomic_setpoint");
            const Json& rj = require(hj, ptr, "policy_repertoire");
            if (!rj.is_array())
                throw ScenarioError("expected an array", ptr + "/policy_repertoire");
            for (std::size_t k = 0; k < rj.size(); ++k)
                h.policy_repertoire.push_back(integer(
                    rj[k], ptr + "/policy_repertoire/" + std::to_string(k)));
            s.space.hypotheses.push_back(std::move(h));
        }
    }

    {
        const Json& ps = require(doc, "", "policies");
        if (!ps.is_array()) throw ScenarioError("expected an array", "/policies");
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const std::string ptr = "/policies/" + std::to_string(i);
            check_keys(ps[i], ptr, {"id", "actions", "generated_by"}, strict, warnings);
            Policy p;
            p.id = integer(require(ps[i], ptr, "id"), ptr + "/id");
            const Json& aj = require(ps[i], ptr, "actions");
            if (!aj.is_array()) throw ScenarioError("expected an array", ptr + "/actions");
            for (std::size_t k = 0; k < aj.size(); ++k)
                p.actions.push_back(
                    integer(aj[k], ptr + "/actions/" + std::to_string(k)));
            p.generated_by =
                integer(require(ps[i], ptr, "generated_by"), ptr + "/generated_by");
            s.policies.push_back(std::move(p));
        }
    }

    {
        const Json& init = require(doc, "", "initial");
        check_keys(init, "/initial",
                   {"context", "hypothesis_posterior", "precision",
                    "precision_bounds", "authorized", "arousal",
                    "control_capacity", "gain"},
                   strict, warnings);
        if (init.contains("context"))
            s.initial_context = integer(init["context"], "/initial/context");
        if (init.contains("hypothesis_posterior"))
            s.initial_hypothesis_posterior = number_array(
                init["hypothesis_posterior"], "/initial/hypothesis_posterior");
        if (init.contains("precision"))
            s.initial_precision =
                number_array(init["precision"], "/initial/precision");
        if (init.contains("precision_bounds")) {
            const auto bounds =
                number_array(init["precision_bounds"], "/initial/precision_bounds");
            if (bounds.size() != 2)
                throw ScenarioError("expected [min, max]", "/initial/precision_bounds");
            s.min_precision = bounds[0];
            s.max_precision = bounds[1];
        }
        const Json& auth = require(init, "/initial", "authorized");
        if (!auth.is_array())
            throw ScenarioError("expected an array", "/initial/authorized");
        for (std::size_t k = 0; k < auth.size(); ++k)
            s.initial_authorized.insert(
                io_detail::integer(auth[k], "/initial/authorized/" + std::to_string(k)));
        s.initial_arousal =
            number(require(init, "/initial", "arousal"), "/initial/arousal");
        s.initial_capacity = number(require(init, "/initial", "control_capacity"),
                                    "/initial/control_capacity");
        if (init.contains("gain"))
            s.initial_gain = number(init["gain"], "/initial/gain");
    }

    if (doc.contains("selection")) {
        const Json& sel = doc["selection"];
        check_keys(sel, "/selection", {"mode", "gamma"}, strict, warnings);
        const std::string mode = text(require(sel, "/selection", "mode"),
                                      "/selection/mode");
        if (mode == "argmin")
            s.selection_mode = SelectionMode::argmin;
        else if (mode == "softmax")
            s.selection_mode = SelectionMode::softmax;
        else
            throw ScenarioError("expected \"argmin\" or \"softmax\"", "/selection/mode");
        if (sel.contains("gamma"))
            s.selection_gamma = number(sel["gamma"], "/selection/gamma");
    }

    if (doc.contains("governing_rule")) {
        const std::string rule = text(doc["governing_rule"], "/governing_rule");
        if (rule == "authority_gated")
            s.governing_rule = GoverningRule::authority_gated;
        else if (rule == "raw_precision")
            s.governing_rule = GoverningRule::raw_precision;
        else
            throw ScenarioError("expected \"authority_gated\" or \"raw_precision\"",
                                "/governing_rule");
    }

    if (doc.contains("dominance_rule")) {
        const std::string rule = text(doc["dominance_rule"], "/dominance_rule");
        if (rule == "precision_weighted")
            s.dominance_rule = DominanceRule::precision_weighted;
        else if (rule == "posterior_only")
            s.dominance_rule = DominanceRule::posterior_only;
        else
            throw ScenarioError(
                "expected \"precision_weighted\" or \"posterior_only\"",
                "/dominance_rule");
    }

    {
        const Json& tl = require(doc, "", "timeline");
        if (!tl.is_array()) throw ScenarioError("expected an array", "/timeline");
        for (std::size_t i = 0; i < tl.size(); ++i) {
            const std::string ptr = "/timeline/" + std::to_string(i);
            const Json& ej = tl[i];
            TimelineEvent e;
            e.time = number(require(ej, ptr, "t"), ptr + "/t");
            const std::string kind = text(require(ej, ptr, "event"), ptr + "/event");
            if (kind == "observe") {
                e.kind = EventKind::observe;
                check_keys(ej, ptr, {"t", "event", "observation", "identity_relevant"},
                           strict, warnings);
                e.observation =
                    integer(require(ej, ptr, "observation"), ptr + "/observation");
                if (ej.contains("identity_relevant"))
                    e.identity_relevant =
                        boolean(ej["identity_relevant"], ptr + "/identity_relevant");
            } else if (kind == "stress") {
                e.kind = EventKind::stress;
                check_keys(ej, ptr,
                           {"t", "event", "magnitude", "duration", "identity_relevant"},
                           strict, warnings);
                e.magnitude = number(require(ej, ptr, "magnitude"), ptr + "/magnitude");
                e.duration = number(require(ej, ptr, "duration"), ptr + "/duration");
                if (ej.contains("identity_relevant"))
                    e.identity_relevant =
                        boolean(ej["identity_relevant"], ptr + "/identity_relevant");
            } else if (kind == "authorize" || kind == "deauthorize") {
                e.kind = kind == "authorize" ? EventKind::authorize
                                             : EventKind::deauthorize;
                check_keys(ej, ptr, {"t", "event", "hypothesis"}, strict, warnings);
                e.hypothesis =
                    integer(require(ej, ptr, "hypothesis"), ptr + "/hypothesis");
            } else if (kind == "set_precision") {
                e.kind = EventKind::set_precision;
                check_keys(ej, ptr, {"t", "event", "hypothesis", "value"}, strict,
                           warnings);
                e.hypothesis =
                    integer(require(ej, ptr, "hypothesis"), ptr + "/hypothesis");
                e.value = number(require(ej, ptr, "value"), ptr + "/value");
            } else if (kind == "set_gain") {
                e.kind = EventKind::set_gain;
                check_keys(ej, ptr, {"t", "event", "value"}, strict, warnings);
                e.value = number(require(ej, ptr, "value"), ptr + "/value");
            } else if (kind == "context") {
                e.kind = EventKind::context_switch;
                check_keys(ej, ptr, {"t", "event", "context"}, strict, warnings);
                e.context = integer(require(ej, ptr, "context"), ptr + "/context");
            } else {
                throw ScenarioError("unknown event kind \"" + kind + "\"",
                                    ptr + "/event");
            }
            s.timeline.push_back(e);
        }
    }
    return s;
}

// Full parse: structure plus semantic validation. Throws ScenarioError whose
// message names the violated invariant and the offending hypothesis/field.
inline Scenario parse_scenario(const Json& doc, bool strict = true,
                               std::vector<std::string>* warnings = nullptr) {
    Scenario s = parse_scenario_document(doc, strict, warnings);
    const auto report = validate_scenario(s);
    if (!report.valid()) {
        std::string what = "semantic violation: " + report.violations[0].message;
        if (report.violations.size() > 1)
            what += " (+" + std::to_string(report.violations.size() - 1) + " more)";
        throw ScenarioError(what);
    }
    return s;
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ScenarioError(std::string("syntax error: ") + e.what(), path);
    }
}

inline Scenario parse_scenario_file(const std::string& path, bool strict = true,
                                    std::vector<std::string>* warnings = nullptr) {
    return parse_scenario(load_json_file(path), strict, warnings);
}

// Canonical emission: fixed key order, every field explicit. parse(emit(s))
// reproduces s exactly (numbers are serialized with full round-trip
// precision), and emit(parse(f)) is the canonical form of f.
inline OrderedJson emit_scenario(const Scenario& s) {
    OrderedJson doc;
    doc["version"] = kScenarioFormatVersion;
    doc["id"] = s.id;
    doc["seed"] = s.seed;
    doc["horizon"] = s.horizon;
    doc["endorsed"] = s.endorsed;

    doc["params"] = {{"dt", s.params.dt},
                     {"recovery_tau", s.params.recovery_tau},
                     {"control_strength", s.params.control.strength},
                     {"control_depletion_rate", s.params.control.depletion_rate},
                     {"control_recovery_rate", s.params.control.recovery_rate},
                     {"precision_rate", s.params.precision_rate}};

    doc["space"]["states"] = s.space.num_states;
    doc["space"]["observations"] = s.space.num_observations;
    doc["space"]["actions"] = s.space.num_actions;
    doc["space"]["hypotheses"] = OrderedJson::array();
    for (const auto& h : s.space.hypotheses) {
        OrderedJson hj;
        hj["id"] = h.id;
        hj["label"] = h.label;
        hj["likelihood"] = h.likelihood;
        hj["transition"] = h.transition;
        hj["preferences"] = h.preferences;
        hj["state_prior"] = h.state_prior;
        hj["autonomic_setpoint"] = h.autonomic_setpoint;
        hj["policy_repertoire"] = h.policy_repertoire;
        doc["space"]["hypotheses"].push_back(std::move(hj));
    }

    doc["policies"] = OrderedJson::array();
    for (const auto& p : s.policies) {
        OrderedJson pj;
        pj["id"] = p.id;
        pj["actions"] = p.actions;
        pj["generated_by"] = p.generated_by;
        doc["policies"].push_back(std::move(pj));
    }

    doc["initial"]["context"] = s.initial_context;
    if (!s.initial_hypothesis_posterior.empty())
        doc["initial"]["hypothesis_posterior"] = s.initial_hypothesis_posterior;
    if (!s.initial_precision.empty())
        doc["initial"]["precision"] = s.initial_precision;
    doc["initial"]["precision_bounds"] = {s.min_precision, s.max_precision};
    doc["initial"]["authorized"] = s.initial_authorized;
    doc["initial"]["arousal"] = s.initial_arousal;
    doc["initial"]["control_capacity"] = s.initial_capacity;
    doc["initial"]["gain"] = s.initial_gain;

    doc["selection"]["mode"] =
        s.selection_mode == SelectionMode::argmin ? "argmin" : "softmax";
    doc["selection"]["gamma"] = s.selection_gamma;
    doc["governing_rule"] = s.governing_rule == GoverningRule::authority_gated
                                ? "authority_gated"
                                : "raw_precision";
    doc["dominance_rule"] = s.dominance_rule == DominanceRule::precision_weighted
                                ? "precision_weighted"
                                : "posterior_only";

    doc["timeline"] = OrderedJson::array();
    for (const auto& e : s.timeline) {
        OrderedJson ej;
        ej["t"] = e.time;
        switch (e.kind) {
            case EventKind::observe:
                ej["event"] = "observe";
                ej["observation"] = e.observation;
                ej["identity_relevant"] = e.identity_relevant;
                break;
            case EventKind::stress:
                ej["event"] = "stress";
                ej["magnitude"] = e.magnitude;
                ej["duration"] = e.duration;
                ej["identity_relevant"] = e.identity_relevant;
                break;
            case EventKind::authorize:
                ej["event"] = "authorize";
                ej["hypothesis"] = e.hypothesis;
                break;
            case EventKind::deauthorize:
                ej["event"] = "deauthorize";
                ej["hypothesis"] = e.hypothesis;
                break;
            case EventKind::set_precision:
                ej["event"] = "set_precision";
                ej["hypothesis"] = e.hypothesis;
                ej["value"] = e.value;
                break;
            case EventKind::set_gain:
                ej["event"] = "set_gain";
                ej["value"] = e.value;
                break;
            case EventKind::context_switch:
                ej["event"] = "context";
                ej["context"] = e.context;
                break;
        }
        doc["timeline"].push_back(std::move(ej));
    }
    return doc;
}

inline std::string scenario_to_string(const Scenario& s) {
    return emit_scenario(s).dump(2) + "\n";
}

// FNV-1a over the canonical serialization: a stable fingerprint of every
// parameter, recorded in all output artifacts.
inline std::string parameter_hash(const Scenario& s) {
    const std::string text = scenario_to_string(s);
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[hash & 0xF];
        hash >>= 4;
    }
    return out;
}

}  // namespace alpsim
