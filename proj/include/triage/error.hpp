#pragma once

#include <stdexcept>
#include <string>

namespace triage {

// Malformed or invalid input data (CSV, probe dumps, generator configs).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed, incompatible, or inconsistent model bundles.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failures: non-convergence, non-finite loss, invalid spectra.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace triage
