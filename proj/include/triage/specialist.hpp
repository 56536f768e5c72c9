#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "triage/kernels.hpp"
#include "triage/pca.hpp"
#include "triage/telemetry.hpp"

namespace triage {

struct TrainConfig {
    double learning_rate = 0.1;
    double l2_lambda = 1e-3;
    int max_iters = 5000;
    double grad_tol = 1e-6;   // on the infinity norm of (grad_w, grad_b)

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct TrainMeta {
    int iterations_run = 0;
    double final_grad_inf_norm = 0.0;
    double final_loss = 0.0;

    bool operator==(const TrainMeta&) const = default;
};

// One-vs-rest logistic detector for a single malware family.
struct SpecialistModel {
    FamilyLabel family = FamilyLabel::gold_dream;
    std::vector<double> weights;
    double bias = 0.0;
    std::uint64_t standardizer_ref = 0;   // fingerprint of the standardizer it was trained on
    TrainMeta meta;

    bool operator==(const SpecialistModel&) const = default;
};

inline constexpr int kMaxStepHalvings = 30;

std::uint64_t fingerprint(const Standardizer& s);

kernels::LossGrad loss_and_gradient(std::span<const double> w, double b, const Matrix& z,
                                    std::span<const double> y, double l2_lambda,
                                    Execution exec = Execution::parallel);

// Full-batch gradient descent from w = 0, b = 0. A step that would raise the
// loss is halved (at most kMaxStepHalvings times); if no halving helps,
// training stops there.
SpecialistModel train_specialist(FamilyLabel family, const Dataset& dataset,
                                 const Standardizer& standardizer, const TrainConfig& cfg = {},
                                 Execution exec = Execution::parallel);

double predict_prob_standardized(const SpecialistModel& m, std::span<const double> z);
double predict_prob(const SpecialistModel& m, const Sample& x, const Standardizer& standardizer);

} // namespace triage
