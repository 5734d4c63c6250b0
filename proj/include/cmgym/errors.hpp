#pragma once

#include <stdexcept>

namespace cmgym {

/// Invalid or inconsistent configuration, detected before any state changes.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Environment used out of order (e.g. step before reset).
class LifecycleError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Reference to an agent or vertiport that does not exist.
class IdentifierError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace cmgym
