#pragma once

#include <stdexcept>
#include <string>

namespace tpa {

// Invalid physical or numerical parameters.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Adaptive quadrature hit its subdivision limit before reaching tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial_estimate, double achieved_tolerance)
        : std::runtime_error(what), partial_(partial_estimate), achieved_(achieved_tolerance) {}

    double partial_estimate() const noexcept { return partial_; }
    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double partial_;
    double achieved_;
};

// ODE step size collapsed.
class StiffnessError : public std::runtime_error {
public:
    StiffnessError(const std::string& what, double t, double step)
        : std::runtime_error(what), t_(t), step_(step) {}

    double time() const noexcept { return t_; }
    double step() const noexcept { return step_; }

private:
    double t_;
    double step_;
};

// A conserved quantity (density-matrix trace) drifted.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested grid is larger than the memory budget allows.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user configuration; `path()` names the offending field, e.g. "family.omega_a_width".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Filesystem failure in the CLI layer.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tpa
