#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "triage/pca.hpp"
#include "triage/telemetry.hpp"

namespace triage {

inline constexpr double kSigmaFloor = 1e-6;
inline constexpr double kDefaultQuantile = 0.95;

// Symptom profile of one family: per-symptom centre and spread in
// standardized units, plus the calibrated trigger threshold tau.
struct FamilySignature {
    FamilyLabel family = FamilyLabel::benign;
    std::vector<std::size_t> symptoms;
    std::vector<double> mu;
    std::vector<double> sigma;
    double tau = 0.0;
    double quantile = kDefaultQuantile;

    bool operator==(const FamilySignature&) const = default;
};

struct TriggerReport {
    std::vector<std::pair<FamilyLabel, double>> triggered;   // ascending score
    std::size_t features_inspected = 0;
};

// 1-based nearest-rank position ceil(q * n), clamped to [1, n].
std::size_t nearest_rank(double quantile, std::size_t n);

FamilySignature build_signature(FamilyLabel family, std::span<const Sample> samples,
                                const Standardizer& standardizer,
                                std::vector<std::size_t> symptoms,
                                double quantile = kDefaultQuantile);

// sqrt(mean_i ((z[s_i] - mu_i) / sigma_i)^2); reads only the symptom features.
double suspicion_score(const FamilySignature& sig, std::span<const double> z);

std::size_t symptom_union_size(std::span<const FamilySignature> signatures);

// Standardizes x once and scores it against every signature. When
// `benign_gate` is given and x scores within the gate's threshold, family
// checks are skipped and nothing triggers.
TriggerReport run_monitor(const Sample& x, std::span<const FamilySignature> signatures,
                          const Standardizer& standardizer,
                          const FamilySignature* benign_gate = nullptr);

} // namespace triage
