#include <cassert>
#include <stdexcept>
#include <utility>

#include <omp.h>

#include "triage/kernels.hpp"

namespace triage::kernels::omp {

Matrix covariance(const Matrix& z) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    if (n < 2) throw std::invalid_argument("covariance: need at least 2 rows");

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(d * (d + 1) / 2);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) pairs.emplace_back(i, j);

    Matrix s(d, d);
    const double denom = static_cast<double>(n - 1);
    const auto npairs = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < npairs; ++k) {
        const auto [i, j] = pairs[static_cast<std::size_t>(k)];
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += z(r, i) * z(r, j);
        s(i, j) = acc / denom;
        s(j, i) = s(i, j);
    }
    return s;
}

namespace {

// Per-sample residuals and log-likelihood terms, computed in parallel.
void sample_terms(std::span<const double> w, double b, const Matrix& z, std::span<const double> y,
                  std::vector<double>& residual, std::vector<double>& ll) {
    const auto n = static_cast<std::ptrdiff_t>(z.rows());
    residual.resize(z.rows());
    ll.resize(z.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double p = sigmoid(dot(w, z.row(u)) + b);
        residual[u] = p - y[u];
        ll[u] = clamped_log_loss(p, y[u]);
    }
}

} // namespace

LossGrad logistic_loss_grad(std::span<const double> w, double b, const Matrix& z,
                            std::span<const double> y, double l2_lambda) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    assert(w.size() == d && y.size() == n && n > 0);

    std::vector<double> residual, ll;
    sample_terms(w, b, z, y, residual, ll);

    double llsum = 0.0;
    double rsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        llsum += ll[i];
        rsum += residual[i];
    }

    LossGrad out;
    out.grad_w.assign(d, 0.0);
    const double nd = static_cast<double>(n);
    const auto dd = static_cast<std::ptrdiff_t>(d);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t f = 0; f < dd; ++f) {
        const auto u = static_cast<std::size_t>(f);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += z(i, u) * residual[i];
        out.grad_w[u] = acc / nd + l2_lambda * w[u];
    }
    double wsq = 0.0;
    for (double v : w) wsq += v * v;
    out.grad_b = rsum / nd;
    out.loss = -llsum / nd + 0.5 * l2_lambda * wsq;
    return out;
}

double logistic_loss(std::span<const double> w, double b, const Matrix& z,
                     std::span<const double> y, double l2_lambda) {
    assert(w.size() == z.cols() && y.size() == z.rows() && z.rows() > 0);
    std::vector<double> residual, ll;
    sample_terms(w, b, z, y, residual, ll);
    double llsum = 0.0;
    for (double v : ll) llsum += v;
    double wsq = 0.0;
    for (double v : w) wsq += v * v;
    return -llsum / static_cast<double>(z.rows()) + 0.5 * l2_lambda * wsq;
}

} // namespace triage::kernels::omp
