#pragma once

#include <cstddef>
#include <vector>

#include "triage/matrix.hpp"

namespace triage {

struct JacobiOptions {
    double tolerance = 1e-12;    // max |off-diagonal| at convergence
    int max_sweeps = 100;
    double symmetry_tolerance = 1e-9;
};

struct EigenDecomposition {
    std::vector<double> values;   // descending
    Matrix vectors;               // row j is the unit eigenvector for values[j]
    int sweeps = 0;
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
//
// Output is fully deterministic: eigenvalues sorted descending with ties kept
// in diagonal (input index) order, and each eigenvector's largest-magnitude
// component made positive (ties resolved toward the lowest index).
//
// Throws std::invalid_argument for non-square or non-symmetric input and
// NumericError if the off-diagonal mass has not vanished after max_sweeps.
EigenDecomposition eig_sym(const Matrix& s, const JacobiOptions& options = {});

// Flips v so its largest-magnitude component is positive.
void apply_sign_convention(std::span<double> v);

} // namespace triage
