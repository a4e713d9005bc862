#pragma once

#include <stdexcept>
#include <string>

namespace kerrbath {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical or numerical input.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The Fock truncation cannot represent the requested state.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, int required_dimension)
        : Error(what), required_dimension_(required_dimension) {}

    int required_dimension() const noexcept { return required_dimension_; }

private:
    int required_dimension_;
};

/// A frequency integral missed its tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : Error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// A least-squares fit could not be carried out on the supplied data.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace kerrbath
