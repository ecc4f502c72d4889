#pragma once

#include <stdexcept>
#include <string>

namespace alpsim {

// Base class for every error raised by the simulator core.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Prior and likelihood supports are disjoint, or every hypothesis assigns
// (numerically) zero mass to the realized observation.
class DegenerateEvidenceError : public Error {
public:
    explicit DegenerateEvidenceError(const std::string& what) : Error(what) {}
};

class UnknownHypothesisError : public Error {
public:
    explicit UnknownHypothesisError(int id)
        : Error("unknown hypothesis id " + std::to_string(id)) {}
};

// Deauthorizing the last authorized hypothesis while regulation is active.
class EmptyGovernanceError : public Error {
public:
    explicit EmptyGovernanceError(const std::string& what) : Error(what) {}
};

class EmptyPolicySetError : public Error {
public:
    EmptyPolicySetError() : Error("policy set is empty") {}
};

// Distinct from EmptyPolicySetError: policies exist but none is generated by
// an authorized hypothesis.
class EmptyAdmissiblePolicyError : public Error {
public:
    EmptyAdmissiblePolicyError()
        : Error("no policy is generated by an authorized hypothesis") {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Recovery-constant fitting: constant trace, too few decay samples, etc.
class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error(what) {}
};

// Scenario file problems. `location` is a JSON pointer ("/space/hypotheses/0")
// or a byte position for syntax errors; empty when not applicable.
class ScenarioError : public Error {
public:
    ScenarioError(const std::string& what, std::string location = {})
        : Error(location.empty() ? what : what + " (at " + location + ")"),
          location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

// A module error that surfaced while stepping a scenario; carries the step.
class RunError : public Error {
public:
    RunError(int step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

    int step() const noexcept { return step_; }

private:
    int step_;
};

}  // namespace alpsim
