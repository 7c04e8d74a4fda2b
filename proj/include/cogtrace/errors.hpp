#pragma once

#include <stdexcept>
#include <string>

namespace cogtrace {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Taxonomy lookups.
struct UnknownElementError : Error {
    using Error::Error;
};
struct UnknownProblemTypeError : Error {
    using Error::Error;
};

// Corpus loading and validation.
struct MalformedRecordError : Error {
    using Error::Error;
};
struct SpanOutOfBoundsError : Error {
    using Error::Error;
};
struct DuplicateTraceIdError : Error {
    using Error::Error;
};

// Relation classification.
struct DegenerateSpanError : Error {
    using Error::Error;
};

// Statistics and extraction.
struct EmptySliceError : Error {
    using Error::Error;
};
struct NoSuccessesError : Error {
    using Error::Error;
};
struct InsufficientDataError : Error {
    using Error::Error;
};

// External model interaction.
struct ClientError : Error {
    using Error::Error;
};
struct UnparseableReplyError : Error {
    using Error::Error;
};
struct TemplateError : Error {
    using Error::Error;
};
struct ZeroBaselineError : Error {
    using Error::Error;
};

}  // namespace cogtrace
