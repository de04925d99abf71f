// errors.hpp — Exception hierarchy shared by all modules
//
// Two families: InputError (bad shapes, values, schema; CLI exit code 2) and
// NumericalError (resonant shifts, ill-conditioned exponentials; exit code 3).

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semigroup {

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Matrix dimensions are inconsistent with the requested operation.
class ShapeError : public InputError {
public:
    using InputError::InputError;
};

// Result would exceed the configured dense dimension cap.
class SizeError : public InputError {
public:
    using InputError::InputError;
};

// Argument outside its mathematical domain (negative time, nu <= 0, ...).
class DomainError : public InputError {
public:
    using InputError::InputError;
};

// SystemModel invariants violated (non-Hermitian coupling, bad bath state).
class ModelError : public InputError {
public:
    using InputError::InputError;
};

// Ring model does not commute with the lattice shift.
class SymmetryError : public InputError {
public:
    SymmetryError(const std::string& what, double defect)
        : InputError(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

// Requested computation exceeds a documented cost cap.
class CostError : public InputError {
public:
    using InputError::InputError;
};

// Structured input file violates its schema; path names the offending field.
class SchemaError : public InputError {
public:
    SchemaError(const std::string& path, const std::string& message)
        : InputError(path + ": " + message), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Shift z sits on (or within guard of) an eigenvalue of the superoperator.
class ResonanceError : public NumericalError {
public:
    ResonanceError(const std::string& what, std::size_t left_index, std::size_t right_index)
        : NumericalError(what), left_(left_index), right_(right_index) {}
    std::size_t left_index() const noexcept { return left_; }
    std::size_t right_index() const noexcept { return right_; }

private:
    std::size_t left_;
    std::size_t right_;
};

class ConditioningError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace semigroup
