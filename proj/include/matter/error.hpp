// Error taxonomy shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace matter {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor shapes / dimensions disagree.
struct ShapeError : Error {
    using Error::Error;
};

// NaN/Inf where finite values are required.
struct NumericError : Error {
    using Error::Error;
};

// Caller violated an operation contract (empty input, bad argument).
struct InputError : Error {
    using Error::Error;
};

// On-disk artifact is malformed or has the wrong version/width.
struct FormatError : Error {
    using Error::Error;
};

// Artifacts drift apart (index/store/checkpoint built from different state).
struct ConsistencyError : Error {
    using Error::Error;
};

// Bad configuration value or mismatched model config.
struct ConfigError : Error {
    using Error::Error;
};

// Operation requires state that was never built (e.g. ANN graph).
struct StateError : Error {
    using Error::Error;
};

// Template rendering with a missing required field.
struct TemplateError : Error {
    using Error::Error;
};

// Corpus ingestion problem (duplicate ids and friends).
struct IngestionError : Error {
    using Error::Error;
};

// Training loss went non-finite; last good checkpoint was kept.
struct TrainingDiverged : Error {
    using Error::Error;
};

}  // namespace matter
