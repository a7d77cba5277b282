#pragma once

#include <stdexcept>
#include <string>

namespace qpr {

/** Exit codes used by the command line tool. */
enum ExitCode {
    EXIT_OK = 0,
    EXIT_PARSE = 2,        // malformed graph / perturbation / config input
    EXIT_CONVERGENCE = 3,  // iteration failed to converge
    EXIT_SCALE = 4,        // problem size beyond the configured cap
    EXIT_INADMISSIBLE = 5, // perturbation violates stochasticity constraints
    EXIT_CHI_DOMAIN = 6,   // requested chi outside the admissible domain
};

struct Error : std::runtime_error {
    ExitCode code;
    Error(ExitCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(EXIT_PARSE, msg) {}
};

struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(EXIT_CONVERGENCE, msg) {}
};

struct ScaleError : Error {
    explicit ScaleError(const std::string& msg) : Error(EXIT_SCALE, msg) {}
};

struct AdmissibilityError : Error {
    explicit AdmissibilityError(const std::string& msg) : Error(EXIT_INADMISSIBLE, msg) {}
};

struct ChiDomainError : Error {
    explicit ChiDomainError(const std::string& msg) : Error(EXIT_CHI_DOMAIN, msg) {}
};

/** Numerically ill-posed situation (eigenvalue collision, zero gap, ...). */
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(EXIT_CONVERGENCE, msg) {}
};

} // namespace qpr
