#pragma once

#include <stdexcept>
#include <string>

namespace wildgrid {

// Error taxonomy shared by the core library and mapped to status codes at the
// C API boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct UnknownBusError : ValidationError {
    using ValidationError::ValidationError;
};

struct ConfigError : Error {
    using Error::Error;
};

struct InvalidParamsError : Error {
    using Error::Error;
};

struct BackendError : Error {
    using Error::Error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

struct SizeGuardError : Error {
    using Error::Error;
};

struct InfeasiblePlanError : Error {
    using Error::Error;
};

struct CutGenerationError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

}  // namespace wildgrid
