#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcond {

// Bad call arguments: shape mismatches, out-of-range parameters, empty inputs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A non-finite value appeared while evaluating the network.
class NumericOverflow : public std::runtime_error {
public:
    NumericOverflow(std::size_t layer_index, const std::string& what)
        : std::runtime_error(what), layer_index_(layer_index) {}

    std::size_t layer_index() const noexcept { return layer_index_; }

private:
    std::size_t layer_index_ = 0;
};

// File could not be parsed; carries whatever location context is known.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File parsed but violates a structural invariant; names the failing layer
// when one is known.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what)
        : std::runtime_error(what) {}
    ValidationError(std::size_t layer_index, const std::string& what)
        : std::runtime_error("layer " + std::to_string(layer_index) + ": " + what),
          layer_index_(static_cast<long>(layer_index)) {}

    // -1 when no specific layer is implicated.
    long layer_index() const noexcept { return layer_index_; }

private:
    long layer_index_ = -1;
};

// ||y|| = 0: the relative condition number is undefined at this input.
class DegenerateOutput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// All candidate gradient directions vanished; the classifier is locally flat.
class DegenerateGradient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A batch operation skipped every input.
class EmptyResult : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace netcond
