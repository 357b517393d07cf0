#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace subdiff {

/// Value of an improper integral that may fail to converge. Divergence is a
/// legitimate answer, not an error; callers that cannot proceed on a
/// divergent value raise RefusalError instead.
class CriterionValue {
public:
    static CriterionValue finite(double v) { return CriterionValue(v); }
    static CriterionValue divergent() {
        return CriterionValue(std::numeric_limits<double>::infinity());
    }

    bool is_divergent() const { return !std::isfinite(v_); }
    bool is_finite() const { return std::isfinite(v_); }

    double value() const {
        if (is_divergent()) throw std::logic_error("CriterionValue: divergent");
        return v_;
    }
    double value_or_inf() const { return v_; }

private:
    explicit CriterionValue(double v) : v_(v) {}
    double v_;
};

/// Raised when a construction is requested on a divergent criterion.
/// Maps to CLI exit code 2: a correct mathematical answer, not a failure.
class RefusalError : public std::runtime_error {
public:
    explicit RefusalError(const std::string& what_arg)
        : std::runtime_error("criterion divergent: " + what_arg) {}
};

/// Raised when a grid certification detects a bound violation. Well-formed
/// inputs cannot trigger this; it guards representation and integration bugs.
class CertificationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised on malformed experiment configuration; message carries the field path.
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace subdiff
