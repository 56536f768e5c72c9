#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "triage/pca.hpp"
#include "triage/telemetry.hpp"

namespace triage {

struct RankEntry {
    std::size_t feature = 0;
    double score = 0.0;

    bool operator==(const RankEntry&) const = default;
};

// Features ordered by relevance: descending score, ascending index on ties.
struct FeatureRanking {
    FamilyLabel family = FamilyLabel::benign;
    std::vector<RankEntry> entries;

    bool operator==(const FeatureRanking&) const = default;
};

using RankingMap = std::map<FamilyLabel, FeatureRanking>;

inline constexpr std::size_t kDefaultSymptomCount = 5;

// Relevance of each original feature in the retained PCA space:
//   score(f) = sum_j w_j |v_j[f]|,  w_j = lambda_j / sum_{i<k} lambda_i
// over the retained components j < k. Invariant to eigenvector sign.
std::vector<RankEntry> rank_features(const PcaModel& m);

// Reference per-feature scale for family PCA: the benign samples' std when
// at least two benign samples exist, otherwise the whole dataset's std.
// Zero-variance features get scale 1.
std::vector<double> reference_scale(const Dataset& dataset);

// One ranking per malware family present, each from a PCA fitted on that
// family's samples only (centred on the family mean, scaled by
// reference_scale). Benign samples are never ranked.
RankingMap family_rankings(const Dataset& dataset, double variance_target = kDefaultVarianceTarget,
                           Execution exec = Execution::parallel);

std::vector<std::size_t> top_m_symptoms(const FeatureRanking& ranking,
                                        std::size_t m = kDefaultSymptomCount);

// `family: feat(score) feat(score) ...`, one line per family, scores to 4 dp.
std::string format_rankings(const RankingMap& rankings);

} // namespace triage
