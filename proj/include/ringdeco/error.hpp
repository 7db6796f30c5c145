#pragma once

#include <stdexcept>
#include <string>

namespace ringdeco {

/// Bad input value (non-finite argument, invalid configuration, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Site, mode or order index outside its allowed range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Operation called with the wrong BathSpec variant.
class TypeError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A numerical guard tripped: dimension limits, truncation failure,
/// or an output that violates density-matrix invariants.
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ringdeco
