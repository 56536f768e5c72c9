#include "triage/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>

#include "triage/error.hpp"

namespace triage {

std::vector<RankEntry> rank_features(const PcaModel& m) {
    const std::size_t d = m.dim();
    std::vector<RankEntry> entries(d);
    for (std::size_t f = 0; f < d; ++f) entries[f].feature = f;

    double mass = 0.0;
    for (std::size_t j = 0; j < m.retained_k; ++j) mass += m.eigenvalues[j];
    if (mass > 0.0) {
        for (std::size_t j = 0; j < m.retained_k; ++j) {
            const double w = m.eigenvalues[j] / mass;
            auto v = m.component(j);
            for (std::size_t f = 0; f < d; ++f) entries[f].score += w * std::fabs(v[f]);
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const RankEntry& a, const RankEntry& b) { return a.score > b.score; });
    return entries;
}

std::vector<double> reference_scale(const Dataset& dataset) {
    const Dataset benign = filter_by_label(dataset, FamilyLabel::benign);
    const Standardizer s = fit_standardizer(benign.size() >= 2 ? benign : dataset);
    return s.std;
}

RankingMap family_rankings(const Dataset& dataset, double variance_target, Execution exec) {
    std::vector<FamilyLabel> present;
    for (FamilyLabel family : kMalwareFamilies) {
        std::size_t count = 0;
        for (const auto& s : dataset.samples) count += s.label == family;
        if (count == 0) continue;
        if (count < 2)
            throw DataError("family " + std::string(to_string(family)) + " has " +
                            std::to_string(count) + " sample; at least 2 are required");
        present.push_back(family);
    }
    if (present.empty()) return {};

    const std::vector<double> scale = reference_scale(dataset);
    std::vector<FeatureRanking> results(present.size());
    const auto count = static_cast<std::ptrdiff_t>(present.size());

    // Exceptions must not escape an OpenMP region; capture and rethrow.
    std::vector<std::exception_ptr> errors(present.size());
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        try {
            const Matrix x = feature_matrix(filter_by_label(dataset, present[u]));
            const PcaModel model = fit_pca_scaled(x, scale, variance_target);
            results[u] = FeatureRanking{present[u], rank_features(model)};
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RankingMap out;
    for (auto& r : results) out.emplace(r.family, std::move(r));
    return out;
}

std::vector<std::size_t> top_m_symptoms(const FeatureRanking& ranking, std::size_t m) {
    if (m < 1 || m > ranking.entries.size())
        throw std::invalid_argument("symptom count must be in [1, " +
                                    std::to_string(ranking.entries.size()) + "], got " +
                                    std::to_string(m));
    std::vector<std::size_t> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back(ranking.entries[i].feature);
    return out;
}

std::string format_rankings(const RankingMap& rankings) {
    std::string out;
    char buf[32];
    for (const auto& [family, ranking] : rankings) {
        out += to_string(family);
        out += ':';
        for (const auto& e : ranking.entries) {
            std::snprintf(buf, sizeof(buf), "%.4f", e.score);
            out += ' ';
            out += feature_name(e.feature);
            out += '(';
            out += buf;
            out += ')';
        }
        out += '\n';
    }
    return out;
}

} // namespace triage
