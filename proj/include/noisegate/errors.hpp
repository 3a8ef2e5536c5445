#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noisegate {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (bad thresholds, empty grids, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problems with the input data itself.
class DataError : public Error {
public:
    using Error::Error;
};

class MissingTargetColumn : public DataError {
public:
    explicit MissingTargetColumn(const std::string& column)
        : DataError("target column not found: " + column), column(column) {}
    std::string column;
};

class NonNumericCell : public DataError {
public:
    NonNumericCell(std::size_t row, const std::string& column, const std::string& cell)
        : DataError("non-numeric cell at row " + std::to_string(row) + ", column '" + column +
                    "': \"" + cell + "\""),
          row(row),
          column(column) {}
    std::size_t row;  // 1-based data row (excluding the header)
    std::string column;
};

/// Discretization left one of the two classes empty.
class EmptyClass : public DataError {
public:
    using DataError::DataError;
};

/// The dependent variable has no usable spread (e.g. all values identical).
class DegenerateTarget : public DataError {
public:
    using DataError::DataError;
};

/// A class has too few points for the requested computation.
class InsufficientClass : public DataError {
public:
    using DataError::DataError;
};

class EmptyExtremes : public DataError {
public:
    using DataError::DataError;
};

}  // namespace noisegate
