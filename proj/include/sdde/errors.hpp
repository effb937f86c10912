#ifndef SDDE_ERRORS_HPP
#define SDDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sdde {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument or malformed input (bad generator, delta out of range, ...).
class RejectedInputError : public Error {
public:
    explicit RejectedInputError(const std::string& msg) : Error(msg) {}
};

// A model contract was broken at runtime (e.g. delay(t) outside [0, tau]).
class ModelViolationError : public Error {
public:
    explicit ModelViolationError(const std::string& msg) : Error(msg) {}
};

// A state became non-finite while advancing a path.
class NumericalBlowupError : public Error {
public:
    NumericalBlowupError(const std::string& msg, long step)
        : Error(msg), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

// The stationary-distribution solve had no unique solution.
class NoUniqueStationaryError : public Error {
public:
    explicit NoUniqueStationaryError(const std::string& msg) : Error(msg) {}
};

// A rate equation has no positive root under the given parameters.
class NoPositiveRootError : public Error {
public:
    explicit NoPositiveRootError(const std::string& msg) : Error(msg) {}
};

// The stability margin condition J(1) < 0 is violated.
class MarginViolatedError : public Error {
public:
    explicit MarginViolatedError(const std::string& msg) : Error(msg) {}
};

// Step size too large for the discrete rate equation to be solvable.
class StepTooLargeError : public Error {
public:
    explicit StepTooLargeError(const std::string& msg) : Error(msg) {}
};

// Too many paths blew up for the study result to be meaningful.
class StudyInvalidError : public Error {
public:
    explicit StudyInvalidError(const std::string& msg) : Error(msg) {}
};

// Configuration file errors; `pointer` is a JSON-pointer-like path to the bad field.
class ConfigError : public Error {
public:
    ConfigError(const std::string& pointer, const std::string& msg)
        : Error(pointer + ": " + msg), pointer_(pointer) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

} // namespace sdde

#endif // SDDE_ERRORS_HPP
