#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "triage/jacobi.hpp"
#include "triage/kernels.hpp"
#include "triage/matrix.hpp"
#include "triage/telemetry.hpp"

namespace triage {

// Per-feature centring and scaling. Zero-variance features are flagged in
// constant_mask and given std 1 so every std entry is strictly positive.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std;
    std::vector<bool> constant_mask;

    std::size_t dim() const { return mean.size(); }
    bool operator==(const Standardizer&) const = default;
};

// Rows of `x` are observations. Sample std uses the n-1 divisor.
Standardizer fit_standardizer(const Matrix& x);
Standardizer fit_standardizer(const Dataset& dataset);

std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> x);
Matrix standardize_rows(const Standardizer& s, const Matrix& x);

// n x 16 feature matrix in dataset order.
Matrix feature_matrix(const Dataset& dataset);

// S = Z^T Z / (n - 1); throws std::invalid_argument when n < 2.
Matrix covariance(const Matrix& z, Execution exec = Execution::parallel);

struct PcaModel {
    Standardizer standardizer;
    std::vector<double> eigenvalues;   // descending, clamped at 0
    Matrix eigenvectors;               // row j pairs with eigenvalues[j]
    std::size_t retained_k = 0;
    double variance_target = 0.95;

    std::size_t dim() const { return eigenvalues.size(); }
    std::span<const double> component(std::size_t j) const { return eigenvectors.row(j); }
};

inline constexpr double kDefaultVarianceTarget = 0.95;

// Fraction of eigenvalue mass in the leading k components (0 when the
// spectrum is identically zero). Summation order matches fit_pca's rule.
double cumulative_variance(std::span<const double> eigenvalues, std::size_t k);

// Smallest k with cumulative_variance(k) >= target; 0 for a zero spectrum.
std::size_t retained_components(std::span<const double> eigenvalues, double target);

// Standardizes with the data's own mean/std, then decomposes the covariance.
PcaModel fit_pca(const Matrix& x, double variance_target = kDefaultVarianceTarget);
PcaModel fit_pca(const Dataset& dataset, double variance_target = kDefaultVarianceTarget);

// Centres on the data mean but divides by a caller-supplied reference scale
// (e.g. a baseline population's std), so features whose spread is inflated
// relative to that reference carry proportionally more variance.
PcaModel fit_pca_scaled(const Matrix& x, std::span<const double> scale,
                        double variance_target = kDefaultVarianceTarget);

// Scores on the retained components.
std::vector<double> project(const PcaModel& m, std::span<const double> x);

// Reconstruction from the retained components only, in original units.
std::vector<double> denoise(const PcaModel& m, std::span<const double> x);

} // namespace triage
