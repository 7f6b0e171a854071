#pragma once

#include <stdexcept>
#include <string>

namespace qnetsim {

// Invalid scenario/config input. Maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal simulator invariant broken (illegal FSM edge, event scheduled
// into the past, non-adjacent swap spans). Maps to CLI exit code 2.
struct SimLogicError : std::logic_error {
    explicit SimLogicError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace qnetsim
