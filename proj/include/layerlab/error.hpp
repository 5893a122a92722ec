// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace layerlab {

/// Non-finite or out-of-domain numeric input.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Data that violates a declared bound or schema. `index` names the first
/// offending element when one exists, otherwise -1.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& what, long index = -1)
        : std::runtime_error(what), index_(index) {}
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// Inconsistent or malformed configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A search exceeded its node budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace layerlab
