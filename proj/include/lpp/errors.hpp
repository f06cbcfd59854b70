#pragma once

#include <stdexcept>
#include <string>

namespace lpp {

enum class ErrorKind {
    invalid_argument,
    invalid_region,
    incomparable_endpoints,
    incompatible_endpoints,
    region_too_small,
    too_many_points,
    infeasible,
    io,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "InvalidArgument";
        case ErrorKind::invalid_region: return "InvalidRegion";
        case ErrorKind::incomparable_endpoints: return "IncomparableEndpoints";
        case ErrorKind::incompatible_endpoints: return "IncompatibleEndpoints";
        case ErrorKind::region_too_small: return "RegionTooSmall";
        case ErrorKind::too_many_points: return "TooManyPoints";
        case ErrorKind::infeasible: return "Infeasible";
        case ErrorKind::io: return "IoError";
    }
    return "Unknown";
}

// All library failures are reported through this one exception type; the
// kind lets callers (the CLI in particular) map failures to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const char* what) {
    if (!condition) fail(kind, what);
}

} // namespace lpp
