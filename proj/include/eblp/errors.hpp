#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eblp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (e.g. evaluation point inside the bulk).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested rank or component index is not admissible for the data.
class RankError : public Error {
public:
    using Error::Error;
};

/// Inconsistent vector or matrix dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Operation requires a fitted model.
class StateError : public Error {
public:
    using Error::Error;
};

/// Linear algebra or iterative solver failure.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Malformed text input (matrix files, configs, model files).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Some coordinates are (almost) never observed, so the normalization is singular.
class DegenerateCoordinateError : public Error {
public:
    DegenerateCoordinateError(std::vector<std::size_t> coords, double floor);

    const std::vector<std::size_t>& coordinates() const noexcept { return coords_; }

private:
    std::vector<std::size_t> coords_;
};

}  // namespace eblp
