#pragma once

#include <stdexcept>
#include <string>

namespace usvr {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// File access or parse failure; message carries the path and, for CSV
/// parse errors, the row/column location.
class IoError : public Error {
public:
    using Error::Error;
};

/// Mismatched matrix/vector dimensions between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input values outside an operation's mathematical domain
/// (e.g. targets <= -1 for the log(1+y) transform).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The quadratic form of a dual problem is indefinite beyond tolerance.
class IllPosedProblem : public Error {
public:
    using Error::Error;
};

/// A bias estimate was requested for a dual point whose KKT-implied
/// feasible interval is empty beyond tolerance.
class InconsistentSolution : public Error {
public:
    using Error::Error;
};

/// Every grid point of a model-selection sweep failed to fit.
class SelectionError : public Error {
public:
    using Error::Error;
};

/// Too many trials of an experiment scenario failed.
class ScenarioError : public Error {
public:
    using Error::Error;
};

}  // namespace usvr
