#pragma once

#include <stdexcept>
#include <string>

namespace mislearn {

// User-facing input problems (bad config keys, missing files, malformed CSV).
// The CLI maps these to exit code 2; everything else that escapes maps to 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Estimation failed after exhausting all starts; carries the best point found.
class EstimationError : public std::runtime_error {
public:
    EstimationError(const std::string& msg, std::vector<double> best_point, double best_value)
        : std::runtime_error(msg), best_point(std::move(best_point)), best_value(best_value) {}
    std::vector<double> best_point;
    double best_value;
};

}  // namespace mislearn
