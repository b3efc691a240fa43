#pragma once

#include <stdexcept>
#include <string>

namespace ou {

// Invalid parameter values, missing context, violated preconditions.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// File ingestion or emission failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A statistic left its domain on the given sample (e.g. the log argument of
// the rate estimator came out nonpositive). Carries the offending ratio so
// callers can count and report failures instead of propagating NaN.
class EstimationError : public std::runtime_error {
public:
    EstimationError(const std::string& what, double ratio)
        : std::runtime_error(what), ratio_(ratio) {}

    double ratio() const noexcept { return ratio_; }

private:
    double ratio_;
};

}  // namespace ou
