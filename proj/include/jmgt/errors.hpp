#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jmgt {

/// Invalid parameter or configuration value. `field()` names the offender.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& reason)
        : std::invalid_argument(field + ": " + reason), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Operation called outside the frequency/parameter range where it is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke a structural precondition (shapes, symmetry, support).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Quadrature called with too few samples.
class QuadratureError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

/// An iterative procedure failed. `trace()` holds whatever diagnostics it collected.
class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(const std::string& what, std::vector<double> trace = {})
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

/// Internal consistency check failed.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace jmgt
