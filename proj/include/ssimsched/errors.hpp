#pragma once

#include <stdexcept>

namespace ssimsched {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct DimensionError : Error { using Error::Error; };
struct WindowError : Error { using Error::Error; };
struct ScaleError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct EmptyCorpusError : Error { using Error::Error; };
struct DegenerateInputError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct ScheduleError : Error { using Error::Error; };
struct NonFiniteError : Error { using Error::Error; };
struct SingularSystemError : Error { using Error::Error; };

}  // namespace ssimsched
