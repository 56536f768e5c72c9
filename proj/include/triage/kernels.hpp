#pragma once

// Data-parallel inner loops. Each kernel exists twice: a plain serial
// reference and an OpenMP version. The OpenMP versions parallelise over
// independent outputs (matrix entries, samples, coordinates) and keep every
// floating-point reduction in the serial order, so both produce bitwise
// identical results for any thread count.

#include <span>
#include <vector>

#include "triage/matrix.hpp"

namespace triage {

enum class Execution { serial, parallel };

namespace kernels {

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad_w;
    double grad_b = 0.0;
};

// Probabilities are clamped into [kProbClamp, 1 - kProbClamp] inside logs.
inline constexpr double kProbClamp = 1e-12;

namespace serial {

// S = Z^T Z / (n - 1); upper triangle computed, then mirrored.
Matrix covariance(const Matrix& z);

// Regularised mean binary cross-entropy and its gradient.
LossGrad logistic_loss_grad(std::span<const double> w, double b, const Matrix& z,
                            std::span<const double> y, double l2_lambda);

double logistic_loss(std::span<const double> w, double b, const Matrix& z,
                     std::span<const double> y, double l2_lambda);

} // namespace serial

namespace omp {

Matrix covariance(const Matrix& z);

LossGrad logistic_loss_grad(std::span<const double> w, double b, const Matrix& z,
                            std::span<const double> y, double l2_lambda);

double logistic_loss(std::span<const double> w, double b, const Matrix& z,
                     std::span<const double> y, double l2_lambda);

} // namespace omp

inline Matrix covariance(const Matrix& z, Execution exec) {
    return exec == Execution::serial ? serial::covariance(z) : omp::covariance(z);
}

inline LossGrad logistic_loss_grad(std::span<const double> w, double b, const Matrix& z,
                                   std::span<const double> y, double l2_lambda,
                                   Execution exec) {
    return exec == Execution::serial ? serial::logistic_loss_grad(w, b, z, y, l2_lambda)
                                     : omp::logistic_loss_grad(w, b, z, y, l2_lambda);
}

inline double logistic_loss(std::span<const double> w, double b, const Matrix& z,
                            std::span<const double> y, double l2_lambda, Execution exec) {
    return exec == Execution::serial ? serial::logistic_loss(w, b, z, y, l2_lambda)
                                     : omp::logistic_loss(w, b, z, y, l2_lambda);
}

// Shared per-sample helpers.
double sigmoid(double t);
double clamped_log_loss(double p, double y);

} // namespace kernels
} // namespace triage
