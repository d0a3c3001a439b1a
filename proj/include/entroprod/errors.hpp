#pragma once

#include <stdexcept>
#include <string>

namespace entroprod {

// Base class for all validation and numerical failures raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonHermitianError : Error { using Error::Error; };
struct NonUnitTraceError : Error { using Error::Error; };
struct NotPsdError : Error { using Error::Error; };
struct DimMismatchError : Error { using Error::Error; };
struct LayoutMismatchError : Error { using Error::Error; };
struct UnsupportedDimensionError : Error { using Error::Error; };
struct NoConvergenceError : Error { using Error::Error; };
struct CalibrationError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct DegenerateParamsError : Error { using Error::Error; };

// An integrated state failed re-validation; carries the failing time.
struct StateInvalidError : Error {
    double time;
    StateInvalidError(const std::string& what, double t) : Error(what), time(t) {}
};

}  // namespace entroprod
