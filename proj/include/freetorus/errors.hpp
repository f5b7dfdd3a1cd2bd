#pragma once

#include <stdexcept>
#include <string>

namespace freetorus {

// Malformed input or a violated precondition of a single operation.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The input is well formed but does not satisfy the mathematical hypotheses
// a construction requires. `stage()` names the step that rejected it.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

// An exact post-condition check failed. Never expected on valid input.
class VerificationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace freetorus
