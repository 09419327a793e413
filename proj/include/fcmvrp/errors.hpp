#ifndef FCMVRP_ERRORS_HPP
#define FCMVRP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fcmvrp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid data: broken invariants, bad parameters, malformed inputs.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// File or text that cannot be parsed; message carries the location.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Model construction errors (bound inversion, unknown variable ids, ...).
class ModelError : public Error {
public:
    explicit ModelError(const std::string& msg) : Error(msg) {}
};

} // namespace fcmvrp

#endif
