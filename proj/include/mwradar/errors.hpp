#pragma once

#include <stdexcept>
#include <string>

namespace mwradar {

// Error taxonomy mirrored by the CLI exit codes: validation (2),
// estimation (3), I/O (4). Math-domain violations throw std::domain_error
// and belong to the validation class.

class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

class estimation_error : public std::runtime_error {
public:
    explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Singular or numerically unusable matrix; carries the condition estimate.
class singularity_error : public estimation_error {
public:
    singularity_error(const std::string& what, double condition)
        : estimation_error(what), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mwradar
