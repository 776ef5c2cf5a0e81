#ifndef MSGATE_ERRORS_HPP
#define MSGATE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace msgate {

// Malformed or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Drive calibration did not reach the required fidelity (CLI exit code 3).
class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, double achieved_fidelity)
        : std::runtime_error(what), achieved_fidelity(achieved_fidelity) {}
    double achieved_fidelity;
};

// Integrator failed to meet its error tolerance (CLI exit code 4).
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, long steps_taken, double last_error)
        : std::runtime_error(what), steps_taken(steps_taken), last_error(last_error) {}
    long steps_taken;
    double last_error;
};

} // namespace msgate

#endif
