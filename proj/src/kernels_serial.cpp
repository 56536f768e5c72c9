#include <cassert>
#include <cmath>
#include <stdexcept>

#include "triage/kernels.hpp"

namespace triage::kernels {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double clamped_log_loss(double p, double y) {
    const double pc = std::fmin(std::fmax(p, kProbClamp), 1.0 - kProbClamp);
    return y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
}

namespace serial {

Matrix covariance(const Matrix& z) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    if (n < 2) throw std::invalid_argument("covariance: need at least 2 rows");
    Matrix s(d, d);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += z(r, i) * z(r, j);
            s(i, j) = acc / denom;
            s(j, i) = s(i, j);
        }
    }
    return s;
}

LossGrad logistic_loss_grad(std::span<const double> w, double b, const Matrix& z,
                            std::span<const double> y, double l2_lambda) {
    const std::size_t n = z.rows();
    const std::size_t d = z.cols();
    assert(w.size() == d && y.size() == n && n > 0);

    LossGrad out;
    out.grad_w.assign(d, 0.0);
    double ll = 0.0;
    double rsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = sigmoid(dot(w, z.row(i)) + b);
        const double r = p - y[i];
        ll += clamped_log_loss(p, y[i]);
        rsum += r;
        for (std::size_t f = 0; f < d; ++f) out.grad_w[f] += z(i, f) * r;
    }
    const double nd = static_cast<double>(n);
    double wsq = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
        out.grad_w[f] = out.grad_w[f] / nd + l2_lambda * w[f];
        wsq += w[f] * w[f];
    }
    out.grad_b = rsum / nd;
    out.loss = -ll / nd + 0.5 * l2_lambda * wsq;
    return out;
}

double logistic_loss(std::span<const double> w, double b, const Matrix& z,
                     std::span<const double> y, double l2_lambda) {
    const std::size_t n = z.rows();
    assert(w.size() == z.cols() && y.size() == n && n > 0);
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) ll += clamped_log_loss(sigmoid(dot(w, z.row(i)) + b), y[i]);
    double wsq = 0.0;
    for (double v : w) wsq += v * v;
    return -ll / static_cast<double>(n) + 0.5 * l2_lambda * wsq;
}

} // namespace serial
} // namespace triage::kernels
