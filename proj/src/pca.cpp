#include "triage/pca.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "triage/error.hpp"

namespace triage {

namespace {

constexpr double kNegativeEigenTolerance = 1e-9;

void check_target(double target) {
    if (!(target > 0.0 && target <= 1.0))
        throw std::invalid_argument("variance target must be in (0, 1], got " +
                                    std::to_string(target));
}

PcaModel fit_with(Standardizer standardizer, const Matrix& x, double target) {
    check_target(target);
    const Matrix z = standardize_rows(standardizer, x);
    const EigenDecomposition eig = eig_sym(covariance(z));

    PcaModel m;
    m.standardizer = std::move(standardizer);
    m.eigenvalues = eig.values;
    m.eigenvectors = eig.vectors;
    m.variance_target = target;
    for (double& v : m.eigenvalues) {
        if (v < -kNegativeEigenTolerance)
            throw NumericError("fit_pca: covariance has negative eigenvalue " + std::to_string(v));
        if (v < 0.0) v = 0.0;
    }
    m.retained_k = retained_components(m.eigenvalues, target);
    return m;
}

} // namespace

Standardizer fit_standardizer(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n < 2) throw DataError("fit_standardizer: need at least 2 samples, got " + std::to_string(n));

    Standardizer s;
    s.mean.assign(d, 0.0);
    s.std.assign(d, 1.0);
    s.constant_mask.assign(d, false);
    for (std::size_t f = 0; f < d; ++f) {
        bool constant = true;
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            sum += x(r, f);
            constant = constant && x(r, f) == x(0, f);
        }
        if (constant) {
            s.mean[f] = x(0, f);
            s.constant_mask[f] = true;
            continue;
        }
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dv = x(r, f) - mean;
            ss += dv * dv;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        s.mean[f] = mean;
        if (sd > 0.0) {
            s.std[f] = sd;
        } else {
            s.constant_mask[f] = true;
        }
    }
    return s;
}

Standardizer fit_standardizer(const Dataset& dataset) { return fit_standardizer(feature_matrix(dataset)); }

std::vector<double> apply_standardizer(const Standardizer& s, std::span<const double> x) {
    if (x.size() != s.dim()) throw std::invalid_argument("apply_standardizer: dimension mismatch");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - s.mean[i]) / s.std[i];
    return z;
}

Matrix standardize_rows(const Standardizer& s, const Matrix& x) {
    if (x.cols() != s.dim()) throw std::invalid_argument("standardize_rows: dimension mismatch");
    Matrix z(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t f = 0; f < x.cols(); ++f) z(r, f) = (x(r, f) - s.mean[f]) / s.std[f];
    return z;
}

Matrix feature_matrix(const Dataset& dataset) {
    Matrix x(dataset.size(), kFeatureCount);
    for (std::size_t r = 0; r < dataset.size(); ++r)
        for (std::size_t f = 0; f < kFeatureCount; ++f) x(r, f) = dataset.samples[r].features[f];
    return x;
}

Matrix covariance(const Matrix& z, Execution exec) { return kernels::covariance(z, exec); }

double cumulative_variance(std::span<const double> eigenvalues, std::size_t k) {
    double total = 0.0;
    double head = 0.0;
    for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
        total += eigenvalues[j];
        if (j < k) head = total;
    }
    if (k >= eigenvalues.size()) head = total;
    return total > 0.0 ? head / total : 0.0;
}

std::size_t retained_components(std::span<const double> eigenvalues, double target) {
    check_target(target);
    double total = 0.0;
    for (double v : eigenvalues) total += v;
    if (!(total > 0.0)) return 0;
    double cum = 0.0;
    for (std::size_t k = 1; k <= eigenvalues.size(); ++k) {
        cum += eigenvalues[k - 1];
        if (cum / total >= target) return k;
    }
    return eigenvalues.size();
}

PcaModel fit_pca(const Matrix& x, double variance_target) {
    return fit_with(fit_standardizer(x), x, variance_target);
}

PcaModel fit_pca(const Dataset& dataset, double variance_target) {
    return fit_pca(feature_matrix(dataset), variance_target);
}

PcaModel fit_pca_scaled(const Matrix& x, std::span<const double> scale, double variance_target) {
    if (scale.size() != x.cols()) throw std::invalid_argument("fit_pca_scaled: scale dimension mismatch");
    Standardizer s = fit_standardizer(x);
    for (std::size_t f = 0; f < x.cols(); ++f) {
        if (!(scale[f] > 0.0) || !std::isfinite(scale[f]))
            throw std::invalid_argument("fit_pca_scaled: scale entries must be positive");
        s.std[f] = scale[f];
    }
    return fit_with(std::move(s), x, variance_target);
}

std::vector<double> project(const PcaModel& m, std::span<const double> x) {
    const std::vector<double> z = apply_standardizer(m.standardizer, x);
    std::vector<double> t(m.retained_k);
    for (std::size_t j = 0; j < m.retained_k; ++j) t[j] = dot(m.component(j), z);
    return t;
}

std::vector<double> denoise(const PcaModel& m, std::span<const double> x) {
    const std::vector<double> t = project(m, x);
    const std::size_t d = m.dim();
    std::vector<double> zr(d, 0.0);
    for (std::size_t j = 0; j < t.size(); ++j) {
        auto v = m.component(j);
        for (std::size_t f = 0; f < d; ++f) zr[f] += t[j] * v[f];
    }
    std::vector<double> out(d);
    for (std::size_t f = 0; f < d; ++f)
        out[f] = m.standardizer.mean[f] + m.standardizer.std[f] * zr[f];
    return out;
}

} // namespace triage
