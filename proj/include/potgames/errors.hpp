#pragma once

#include <stdexcept>
#include <string>

namespace potgames {

/// A learner or clock normalizer came out zero: the potential carries no
/// usable gradient/curvature information on the current state.
class DegeneratePotentialError : public std::runtime_error {
public:
    explicit DegeneratePotentialError(const std::string& what)
        : std::runtime_error(what) {}
};

/// A game rule was broken (loss support, aggregate-loss cap, step-size
/// bound). Carries the offending iteration so traces stay debuggable.
class GameRuleViolation : public std::runtime_error {
public:
    GameRuleViolation(const std::string& what, long step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
          step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

/// A strict-positivity (SP) precondition failed for an operation that
/// requires it.
class PositivityError : public std::runtime_error {
public:
    explicit PositivityError(const std::string& what)
        : std::runtime_error(what) {}
};

/// Bad experiment configuration (unknown key, unparsable value, missing
/// required field).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace potgames
