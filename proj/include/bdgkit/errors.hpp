#pragma once

#include <stdexcept>
#include <string>

namespace bdgkit {

// Shape mismatch between a process and its space, or between two processes.
class StructuralError : public std::invalid_argument {
public:
    explicit StructuralError(const std::string& what) : std::invalid_argument(what) {}
};

// An input that is well-shaped but breaks a contract (measurability,
// martingale property, dominance, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Parameter outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Requested object would exceed a configured size limit.
class CapacityError : public std::length_error {
public:
    explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

// Combination of inputs the engine deliberately does not handle.
class UnsupportedError : public std::logic_error {
public:
    explicit UnsupportedError(const std::string& what) : std::logic_error(what) {}
};

} // namespace bdgkit
