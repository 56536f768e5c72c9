#include "triage/specialist.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "triage/error.hpp"

namespace triage {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(l2_lambda >= 0.0)) throw std::invalid_argument("l2_lambda must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
}

std::uint64_t fingerprint(const Standardizer& s) {
    // FNV-1a over the IEEE bit patterns.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    mix(s.dim());
    for (double v : s.mean) mix(std::bit_cast<std::uint64_t>(v));
    for (double v : s.std) mix(std::bit_cast<std::uint64_t>(v));
    for (bool c : s.constant_mask) mix(c ? 1 : 0);
    return h;
}

kernels::LossGrad loss_and_gradient(std::span<const double> w, double b, const Matrix& z,
                                    std::span<const double> y, double l2_lambda, Execution exec) {
    if (z.rows() == 0) throw std::invalid_argument("loss_and_gradient: no samples");
    return kernels::logistic_loss_grad(w, b, z, y, l2_lambda, exec);
}

namespace {

double inf_norm(const kernels::LossGrad& g) {
    double m = std::fabs(g.grad_b);
    for (double v : g.grad_w) m = std::fmax(m, std::fabs(v));
    return m;
}

} // namespace

SpecialistModel train_specialist(FamilyLabel family, const Dataset& dataset,
                                 const Standardizer& standardizer, const TrainConfig& cfg,
                                 Execution exec) {
    cfg.validate();
    if (family == FamilyLabel::benign) throw std::invalid_argument("no specialist for benign");
    const std::string name(to_string(family));

    const std::size_t n = dataset.size();
    std::vector<double> y(n);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = dataset.samples[i].label == family ? 1.0 : 0.0;
        positives += dataset.samples[i].label == family;
    }
    if (positives == 0) throw DataError("specialist " + name + ": no positive samples");
    if (positives == n) throw DataError("specialist " + name + ": no negative samples");

    const Matrix z = standardize_rows(standardizer, feature_matrix(dataset));
    const std::size_t d = z.cols();

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    auto state = loss_and_gradient(w, b, z, y, cfg.l2_lambda, exec);
    if (!std::isfinite(state.loss)) throw NumericError("specialist " + name + ": non-finite loss");

    int iter = 0;
    std::vector<double> w_next(d);
    while (iter < cfg.max_iters && inf_norm(state) >= cfg.grad_tol) {
        double step = cfg.learning_rate;
        bool accepted = false;
        for (int halving = 0; halving <= kMaxStepHalvings; ++halving, step *= 0.5) {
            for (std::size_t f = 0; f < d; ++f) w_next[f] = w[f] - step * state.grad_w[f];
            const double b_next = b - step * state.grad_b;
            const double loss = kernels::logistic_loss(w_next, b_next, z, y, cfg.l2_lambda, exec);
            if (!std::isfinite(loss)) continue;
            if (loss <= state.loss) {
                w = w_next;
                b = b_next;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        ++iter;
        state = loss_and_gradient(w, b, z, y, cfg.l2_lambda, exec);
        if (!std::isfinite(state.loss)) throw NumericError("specialist " + name + ": non-finite loss");
    }

    SpecialistModel model;
    model.family = family;
    model.weights = std::move(w);
    model.bias = b;
    model.standardizer_ref = fingerprint(standardizer);
    model.meta = TrainMeta{iter, inf_norm(state), state.loss};
    return model;
}

double predict_prob_standardized(const SpecialistModel& m, std::span<const double> z) {
    return kernels::sigmoid(dot(m.weights, z) + m.bias);
}

double predict_prob(const SpecialistModel& m, const Sample& x, const Standardizer& standardizer) {
    return predict_prob_standardized(m, apply_standardizer(standardizer, x.features));
}

} // namespace triage
