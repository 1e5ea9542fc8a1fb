#pragma once

#include <stdexcept>
#include <string>

namespace volalab {

// Base class for all contract violations raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- ingestion ---
struct MalformedRow : Error {
    MalformedRow(const std::string& path, long line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": malformed row: " + what), line_number(line) {}
    long line_number;
};
struct NonPositivePrice : Error {
    using Error::Error;
};
struct DuplicateDate : Error {
    using Error::Error;
};
struct EmptyFile : Error {
    using Error::Error;
};
struct MissingColumn : Error {
    using Error::Error;
};
struct TooShort : Error {
    using Error::Error;
};
struct EmptyIntersection : Error {
    using Error::Error;
};

// --- panel construction ---
struct WeekendDate : Error {
    using Error::Error;
};
struct TooFewRows : Error {
    using Error::Error;
};
struct CutoffOutOfRange : Error {
    using Error::Error;
};

// --- descriptive statistics ---
struct NoObservations : Error {
    using Error::Error;
};
struct DegenerateSample : Error {
    using Error::Error;
};

// --- volatility models / estimation ---
struct DimensionMismatch : Error {
    using Error::Error;
};
struct ConstraintViolation : Error {
    using Error::Error;
};
struct NonPositiveVariance : Error {
    using Error::Error;
};
struct RankDeficient : Error {
    using Error::Error;
};
struct SingularHessian : Error {
    using Error::Error;
};

}  // namespace volalab
