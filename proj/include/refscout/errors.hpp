#pragma once

#include <stdexcept>
#include <string>

namespace refscout {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Java source could not be parsed. Carries 1-based line/column.
struct SyntaxError : Error {
    int line;
    int column;
    SyntaxError(const std::string& msg, int line_, int column_)
        : Error(msg + " (line " + std::to_string(line_) + ", column " + std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}
};

/// Input bytes are not valid UTF-8.
struct EncodingError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// A persisted document is structurally broken (truncated, bad key, bad number).
struct FormatError : Error {
    using Error::Error;
};

/// A persisted document declares a format version this build cannot read.
struct VersionError : Error {
    using Error::Error;
};

struct RepoNotFound : Error {
    using Error::Error;
};

struct BranchNotFound : Error {
    using Error::Error;
};

/// A dataset operation needs at least one instance of every class label.
struct EmptyClass : Error {
    using Error::Error;
};

/// Training data contains only one class label.
struct SingleClassData : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Stratified k-fold needs at least k instances per class.
struct TooFewInstances : Error {
    using Error::Error;
};

struct TooFewProjects : Error {
    using Error::Error;
};

struct EmptyGroup : Error {
    using Error::Error;
};

}  // namespace refscout
