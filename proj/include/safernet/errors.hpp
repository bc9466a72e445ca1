#pragma once

#include <stdexcept>
#include <string>

namespace safernet {

// Base for all library errors. The two subcategories map onto CLI exit
// codes: DataError -> 2 (bad inputs), ComputeError -> 3 (valid inputs,
// no answer).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : Error {
    using Error::Error;
};

struct ComputeError : Error {
    using Error::Error;
};

struct CyclicStructure : DataError {
    using DataError::DataError;
};

struct SchemaMismatch : DataError {
    using DataError::DataError;
};

struct InvalidConfig : DataError {
    using DataError::DataError;
};

struct ZeroEvidenceLikelihood : ComputeError {
    using ComputeError::ComputeError;
};

struct StateSpaceTooLarge : ComputeError {
    using ComputeError::ComputeError;
};

struct MissingCollisionVariable : DataError {
    using DataError::DataError;
};

struct ConflictingEvidence : DataError {
    using DataError::DataError;
};

struct NonPositiveProbability : DataError {
    using DataError::DataError;
};

struct Unreachable : ComputeError {
    using ComputeError::ComputeError;
};

struct UnknownNode : DataError {
    using DataError::DataError;
};

struct UnknownState : DataError {
    using DataError::DataError;
};

struct HeaderMismatch : DataError {
    using DataError::DataError;
};

struct RejectedMissing : DataError {
    using DataError::DataError;
};

struct UntaggedVariable : DataError {
    using DataError::DataError;
};

struct StaticInSnapshot : DataError {
    using DataError::DataError;
};

struct UnknownEdge : DataError {
    using DataError::DataError;
};

struct NonMonotoneTimestamps : DataError {
    using DataError::DataError;
};

struct ParseError : DataError {
    using DataError::DataError;
};

}  // namespace safernet
