#include "triage/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "triage/error.hpp"

namespace triage {

std::size_t nearest_rank(double quantile, std::size_t n) {
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw std::invalid_argument("quantile must be in (0, 1]");
    if (n == 0) throw std::invalid_argument("nearest_rank: empty distribution");
    const double pos = std::ceil(quantile * static_cast<double>(n) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(pos, 1.0)), 1, n);
}

FamilySignature build_signature(FamilyLabel family, std::span<const Sample> samples,
                                const Standardizer& standardizer,
                                std::vector<std::size_t> symptoms, double quantile) {
    if (samples.size() < 2)
        throw DataError("signature for " + std::string(to_string(family)) + " needs at least 2 samples");
    if (symptoms.empty()) throw std::invalid_argument("signature needs at least one symptom");
    {
        std::set<std::size_t> distinct(symptoms.begin(), symptoms.end());
        if (distinct.size() != symptoms.size() || *distinct.rbegin() >= standardizer.dim())
            throw std::invalid_argument("symptom indices must be distinct and in range");
    }

    const std::size_t n = samples.size();
    const std::size_t m = symptoms.size();
    std::vector<std::vector<double>> z;
    z.reserve(n);
    for (const auto& s : samples) z.push_back(apply_standardizer(standardizer, s.features));

    FamilySignature sig;
    sig.family = family;
    sig.symptoms = std::move(symptoms);
    sig.quantile = quantile;
    sig.mu.assign(m, 0.0);
    sig.sigma.assign(m, kSigmaFloor);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t f = sig.symptoms[i];
        double sum = 0.0;
        for (const auto& row : z) sum += row[f];
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& row : z) ss += (row[f] - mean) * (row[f] - mean);
        sig.mu[i] = mean;
        sig.sigma[i] = std::max(std::sqrt(ss / static_cast<double>(n - 1)), kSigmaFloor);
    }

    std::vector<double> scores;
    scores.reserve(n);
    for (const auto& row : z) scores.push_back(suspicion_score(sig, row));
    std::sort(scores.begin(), scores.end());
    sig.tau = scores[nearest_rank(quantile, n) - 1];
    return sig;
}

double suspicion_score(const FamilySignature& sig, std::span<const double> z) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sig.symptoms.size(); ++i) {
        const double d = (z[sig.symptoms[i]] - sig.mu[i]) / sig.sigma[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(sig.symptoms.size()));
}

std::size_t symptom_union_size(std::span<const FamilySignature> signatures) {
    std::set<std::size_t> all;
    for (const auto& sig : signatures) all.insert(sig.symptoms.begin(), sig.symptoms.end());
    return all.size();
}

TriggerReport run_monitor(const Sample& x, std::span<const FamilySignature> signatures,
                          const Standardizer& standardizer, const FamilySignature* benign_gate) {
    if (signatures.empty()) throw std::invalid_argument("run_monitor: no signatures");
    const std::vector<double> z = apply_standardizer(standardizer, x.features);

    TriggerReport report;
    report.features_inspected = symptom_union_size(signatures);
    if (benign_gate && suspicion_score(*benign_gate, z) <= benign_gate->tau) return report;

    for (const auto& sig : signatures) {
        const double score = suspicion_score(sig, z);
        if (score <= sig.tau) report.triggered.emplace_back(sig.family, score);
    }
    std::stable_sort(report.triggered.begin(), report.triggered.end(),
                     [](const auto& a, const auto& b) {
                         if (a.second != b.second) return a.second < b.second;
                         return a.first < b.first;
                     });
    return report;
}

} // namespace triage
