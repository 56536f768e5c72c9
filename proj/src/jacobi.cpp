#include "triage/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "triage/error.hpp"

namespace triage {

namespace {

double max_off_diagonal(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
    return m;
}

// Zeroes a(p,q) with a plane rotation; accumulates the rotation into v's columns.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;
    const double app = a(p, p);
    const double aqq = a(q, q);
    const double theta = (aqq - app) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                     (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const std::size_t n = a.rows();

    for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = a(p, k) = c * akp - s * akq;
        a(k, q) = a(q, k) = s * akp + c * akq;
    }
    a(p, p) = app - t * apq;
    a(q, q) = aqq + t * apq;
    a(p, q) = a(q, p) = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

} // namespace

void apply_sign_convention(std::span<double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::fabs(v[i]) > std::fabs(v[best])) best = i;
    if (!v.empty() && v[best] < 0.0)
        for (double& x : v) x = -x;
}

EigenDecomposition eig_sym(const Matrix& s, const JacobiOptions& options) {
    const std::size_t n = s.rows();
    if (s.cols() != n) throw std::invalid_argument("eig_sym: matrix is not square");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!std::isfinite(s(i, j)) || !std::isfinite(s(j, i)))
                throw std::invalid_argument("eig_sym: non-finite entry");
            if (std::fabs(s(i, j) - s(j, i)) > options.symmetry_tolerance)
                throw std::invalid_argument("eig_sym: matrix is not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }

    Matrix a = s;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
    Matrix v = Matrix::identity(n);

    int sweeps = 0;
    while (max_off_diagonal(a) >= options.tolerance) {
        if (sweeps == options.max_sweeps)
            throw NumericError("eig_sym: no convergence after " + std::to_string(sweeps) +
                               " sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
        ++sweeps;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.sweeps = sweeps;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a(src, src);
        auto row = out.vectors.row(j);
        for (std::size_t k = 0; k < n; ++k) row[k] = v(k, src);
        apply_sign_convention(row);
    }
    return out;
}

} // namespace triage
