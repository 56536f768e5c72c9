#include "triage/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "json.hpp"

#include "triage/error.hpp"

namespace triage {

double Prng::gaussian() {
    const std::uint64_t a = next_u64();
    const std::uint64_t b = next_u64();
    constexpr double kScale = 1.0 / 9007199254740992.0;   // 2^-53
    const double u1 = static_cast<double>((a >> 11) + 1) * kScale;
    const double u2 = static_cast<double>(b >> 11) * kScale;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void GeneratorConfig::validate() const {
    auto check_group = [](const GeneratorGroup& g) {
        const std::string name(to_string(g.label));
        if (g.count < 1) throw DataError("generator group " + name + ": count must be >= 1");
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            if (!std::isfinite(g.mean[f]) || !std::isfinite(g.std[f]))
                throw DataError("generator group " + name + ": non-finite parameter");
            if (g.std[f] < 0) throw DataError("generator group " + name + ": negative std");
        }
    };
    if (benign.label != FamilyLabel::benign) throw DataError("benign group must be labelled benign");
    check_group(benign);
    std::set<FamilyLabel> seen;
    for (const auto& g : families) {
        if (g.label == FamilyLabel::benign) throw DataError("family groups cannot be benign");
        if (!seen.insert(g.label).second)
            throw DataError("duplicate family " + std::string(to_string(g.label)));
        check_group(g);
    }
}

namespace {

struct FamilyProfile {
    FamilyLabel family;
    std::array<std::string_view, 5> symptoms;   // lead feature first
};

// Symptom sets follow the published per-family relevance table.
constexpr std::array<FamilyProfile, 6> kProfiles = {{
    {FamilyLabel::gold_dream,
     {"so_mmap_shared_dirty_kb", "page_major_faults", "cursor_pss_kb", "dalvik_heap_free_kb", "cursor_private_dirty_kb"}},
    {FamilyLabel::geinimi,
     {"so_mmap_private_dirty_kb", "page_major_faults", "cursor_pss_kb", "dalvik_heap_free_kb", "cursor_private_dirty_kb"}},
    {FamilyLabel::base_bridge,
     {"ashmem_pss_kb", "page_major_faults", "cursor_private_dirty_kb", "cursor_pss_kb", "dalvik_heap_alloc_kb"}},
    {FamilyLabel::fake_player,
     {"so_mmap_pss_kb", "page_minor_faults", "dalvik_heap_free_kb", "dalvik_heap_alloc_kb", "dalvik_private_dirty_kb"}},
    {FamilyLabel::jsmshider,
     {"ashmem_shared_dirty_kb", "page_major_faults", "ashmem_pss_kb", "dalvik_heap_free_kb", "cursor_pss_kb"}},
    {FamilyLabel::pjapps,
     {"page_minor_faults", "page_major_faults", "cursor_pss_kb", "dalvik_heap_free_kb", "cursor_private_dirty_kb"}},
}};

constexpr FeatureVector kBenignMean = {12, 8, 4, 600, 6, 8000, 2000, 5000, 4800, 3000, 600, 1500, 150, 140, 300, 200};
constexpr FeatureVector kBenignStd = {3, 2, 1, 60, 1, 400, 150, 300, 300, 200, 50, 100, 15, 14, 25, 20};

constexpr double kLeadInflation = 12.0;
constexpr double kSymptomInflation = 6.0;
constexpr double kMeanShift = 3.0;   // in units of the family std

using Json = nlohmann::ordered_json;

Json group_to_json(const GeneratorGroup& g) {
    return Json{{"label", to_string(g.label)}, {"count", g.count}, {"mean", g.mean}, {"std", g.std}};
}

GeneratorGroup group_from_json(const Json& j) {
    GeneratorGroup g;
    g.label = parse_family(j.at("label").get<std::string>());
    g.count = j.at("count").get<std::size_t>();
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto sd = j.at("std").get<std::vector<double>>();
    if (mean.size() != kFeatureCount || sd.size() != kFeatureCount)
        throw DataError("generator group " + std::string(to_string(g.label)) + ": mean/std must have 16 entries");
    std::copy(mean.begin(), mean.end(), g.mean.begin());
    std::copy(sd.begin(), sd.end(), g.std.begin());
    return g;
}

} // namespace

GeneratorConfig default_generator_config() {
    GeneratorConfig cfg;
    cfg.seed = 1;
    cfg.benign = {FamilyLabel::benign, kDefaultBenignCount, kBenignMean, kBenignStd};
    const FeatureSchema& schema = canonical_schema();
    for (const auto& profile : kProfiles) {
        GeneratorGroup g{profile.family, kDefaultFamilyCount, kBenignMean, kBenignStd};
        for (std::size_t i = 0; i < profile.symptoms.size(); ++i) {
            const std::size_t f = schema.index_of(profile.symptoms[i]);
            const double sd = kBenignStd[f] * (i == 0 ? kLeadInflation : kSymptomInflation);
            g.std[f] = sd;
            g.mean[f] = kBenignMean[f] + kMeanShift * sd;
        }
        cfg.families.push_back(g);
    }
    return cfg;
}

std::vector<std::size_t> inflated_features(const GeneratorConfig& cfg, FamilyLabel family) {
    for (const auto& g : cfg.families) {
        if (g.label != family) continue;
        std::vector<std::size_t> out;
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            if (g.std[f] > cfg.benign.std[f]) out.push_back(f);
        return out;
    }
    return {};
}

std::string generator_config_to_json(const GeneratorConfig& cfg) {
    Json j;
    j["seed"] = cfg.seed;
    j["benign"] = group_to_json(cfg.benign);
    auto fams = Json::array();
    for (const auto& g : cfg.families) fams.push_back(group_to_json(g));
    j["families"] = fams;
    return j.dump(2) + "\n";
}

GeneratorConfig generator_config_from_json(std::string_view text) {
    GeneratorConfig cfg;
    try {
        const Json j = Json::parse(text);
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.benign = group_from_json(j.at("benign"));
        for (const auto& g : j.at("families")) cfg.families.push_back(group_from_json(g));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("generator config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

Dataset generate_dataset(const GeneratorConfig& cfg) {
    cfg.validate();
    Prng rng(cfg.seed);
    Dataset out;
    auto emit = [&](const GeneratorGroup& g) {
        const std::string prefix = std::string(to_string(g.label)) + "_";
        for (std::size_t i = 0; i < g.count; ++i) {
            Sample s;
            s.id = prefix + std::to_string(i);
            s.label = g.label;
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                const double v = g.mean[f] + g.std[f] * rng.gaussian();
                s.features[f] = std::max(0.0, v);
            }
            out.samples.push_back(std::move(s));
        }
    };
    emit(cfg.benign);
    for (const auto& g : cfg.families) emit(g);
    return out;
}

} // namespace triage
