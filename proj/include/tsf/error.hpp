#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tsf {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data problems (ingestion, schema, malformed values).
class DataError : public Error {
public:
    using Error::Error;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

/// Zero variance, singular regressors and similar inputs that admit no answer.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Violated calling contract (e.g. backward from a non-scalar node).
class ContractError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Raised when training produces a non-finite loss or gradient.
class TrainingError : public Error {
public:
    TrainingError(std::size_t epoch, std::size_t step, const std::string& what)
        : Error("epoch " + std::to_string(epoch) + ", step " + std::to_string(step) + ": " + what),
          epoch_(epoch),
          step_(step) {}

    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t epoch_;
    std::size_t step_;
};

/// Optimizer ran out of iterations; carries the best point seen.
class FitError : public Error {
public:
    FitError(const std::string& what, std::vector<double> best_point, double best_value)
        : Error(what), best_point_(std::move(best_point)), best_value_(best_value) {}

    const std::vector<double>& best_point() const noexcept { return best_point_; }
    double best_value() const noexcept { return best_value_; }

private:
    std::vector<double> best_point_;
    double best_value_;
};

class SearchError : public Error {
public:
    SearchError(const std::string& what, std::vector<std::string> failures)
        : Error(what), failures_(std::move(failures)) {}

    const std::vector<std::string>& failures() const noexcept { return failures_; }

private:
    std::vector<std::string> failures_;
};

}  // namespace tsf
