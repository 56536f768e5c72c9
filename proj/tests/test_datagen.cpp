#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "triage/datagen.hpp"
#include "triage/error.hpp"

using namespace triage;

TEST(Prng, MatchesReferenceFromSeedOne) {
    Prng p(1);
    oracle::ReferenceXorshift ref(1);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(p.next_u64(), ref.next()) << "output " << i;
}

TEST(Prng, FrozenValues) {
    Prng p(1);
    EXPECT_EQ(p.next_u64(), 0x47e4ce4b896cdd1dULL);
    EXPECT_EQ(p.next_u64(), 0xabcfa6a8e079651dULL);
    EXPECT_EQ(p.next_u64(), 0xb9d10d8feb731f57ULL);
}

TEST(Prng, ZeroSeedIsRemapped) {
    Prng zero(0), remapped(0x9E3779B97F4A7C15ULL);
    EXPECT_EQ(zero, remapped);
    EXPECT_EQ(zero.next_u64(), 0xd83b3e29a21487aULL);
    remapped.next_u64();
    for (int i = 0; i < 100; ++i) EXPECT_EQ(zero.next_u64(), remapped.next_u64());
}

TEST(Prng, GaussianFromTwoDraws) {
    Prng p(7);
    oracle::ReferenceXorshift ref(7);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t a = ref.next(), b = ref.next();
        const double u1 = (static_cast<double>(a >> 11) + 1.0) / 9007199254740992.0;
        const double u2 = static_cast<double>(b >> 11) / 9007199254740992.0;
        const double expected = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        EXPECT_EQ(p.gaussian(), expected);
    }
}

TEST(Prng, GaussianMoments) {
    Prng p(42);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = p.gaussian();
        ASSERT_TRUE(std::isfinite(g));
        sum += g;
        sq += g * g;
    }
    const double mean = sum / n;
    const double var = (sq - n * mean * mean) / (n - 1);
    EXPECT_NEAR(mean, 0.0, 0.02);
    EXPECT_GE(var, 0.97);
    EXPECT_LE(var, 1.03);
}

TEST(Generate, ZeroStdGivesMeanExactly) {
    GeneratorConfig cfg = default_generator_config();
    cfg.benign.std.fill(0.0);
    for (auto& g : cfg.families) g.std.fill(0.0);
    const Dataset d = generate_dataset(cfg);
    for (const auto& s : d.samples) {
        const auto& group = s.label == FamilyLabel::benign
                                ? cfg.benign
                                : *std::find_if(cfg.families.begin(), cfg.families.end(),
                                                [&](const GeneratorGroup& g) { return g.label == s.label; });
        EXPECT_EQ(s.features, group.mean);
    }
}

TEST(Generate, DefaultCountsOrderAndIds) {
    const GeneratorConfig cfg = default_generator_config();
    const Dataset d = generate_dataset(cfg);
    ASSERT_EQ(d.size(), 636u);
    std::size_t malware = 0;
    for (const auto& s : d.samples) malware += s.label != FamilyLabel::benign;
    EXPECT_EQ(malware, 318u);
    EXPECT_EQ(d.samples[0].id, "benign_0");
    EXPECT_EQ(d.samples[317].id, "benign_317");
    EXPECT_EQ(d.samples[318].id, std::string(to_string(cfg.families[0].label)) + "_0");
    EXPECT_EQ(d.samples[635].id, std::string(to_string(cfg.families[5].label)) + "_52");
    for (FamilyLabel f : kMalwareFamilies) EXPECT_EQ(filter_by_label(d, f).size(), 53u);
    for (const auto& s : d.samples)
        for (double v : s.features) EXPECT_GE(v, 0.0);
    EXPECT_NO_THROW(validate_dataset(d));
}

TEST(Generate, ByteDeterministicAndSeedSensitive) {
    GeneratorConfig cfg = default_generator_config();
    const std::string a = write_dataset_csv(generate_dataset(cfg));
    EXPECT_EQ(a, write_dataset_csv(generate_dataset(cfg)));
    cfg.seed = 2;
    EXPECT_NE(a, write_dataset_csv(generate_dataset(cfg)));
}

TEST(Generate, GroupMeansConverge) {
    GeneratorConfig cfg = default_generator_config();
    cfg.benign.count = 10000;
    cfg.families.resize(1);
    cfg.families[0].count = 10000;
    const Dataset d = generate_dataset(cfg);
    for (const GeneratorGroup& g : {cfg.benign, cfg.families[0]}) {
        const Dataset part = filter_by_label(d, g.label);
        const double n = static_cast<double>(part.size());
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            // Means sit many std above zero, so the clamp never bites.
            ASSERT_GT(g.mean[f], 3.0 * g.std[f]);
            double sum = 0.0;
            for (const auto& s : part.samples) sum += s.features[f];
            EXPECT_NEAR(sum / n, g.mean[f], 3.0 * g.std[f] / std::sqrt(n)) << feature_name(f);
        }
    }
}

TEST(DefaultConfig, FamiliesInflateFiveFeatures) {
    const GeneratorConfig cfg = default_generator_config();
    ASSERT_EQ(cfg.families.size(), 6u);
    std::set<std::size_t> leads;
    for (const auto& g : cfg.families) {
        EXPECT_EQ(g.count, kDefaultFamilyCount);
        const auto inflated = inflated_features(cfg, g.label);
        EXPECT_EQ(inflated.size(), 5u);
        std::size_t lead = inflated.front();
        for (std::size_t f : inflated)
            if (g.std[f] / cfg.benign.std[f] > g.std[lead] / cfg.benign.std[lead]) lead = f;
        leads.insert(lead);
    }
    EXPECT_EQ(leads.size(), 6u);
    const auto gold = inflated_features(cfg, FamilyLabel::gold_dream);
    const auto& s = canonical_schema();
    EXPECT_EQ(std::set<std::size_t>(gold.begin(), gold.end()),
              (std::set<std::size_t>{s.index_of("page_major_faults"), s.index_of("cursor_pss_kb"),
                                     s.index_of("dalvik_heap_free_kb"), s.index_of("so_mmap_shared_dirty_kb"),
                                     s.index_of("cursor_private_dirty_kb")}));
}

TEST(ConfigJson, RoundTripAndCheckedInFile) {
    const GeneratorConfig cfg = default_generator_config();
    const std::string text = generator_config_to_json(cfg);
    EXPECT_EQ(generator_config_from_json(text), cfg);
    EXPECT_EQ(read_text_file(TRIAGE_CONFIG_DIR "/default_generator.json"), text);
}

TEST(ConfigJson, Rejections) {
    EXPECT_THROW(generator_config_from_json("{"), DataError);
    GeneratorConfig cfg = default_generator_config();
    cfg.families[1].label = cfg.families[0].label;
    EXPECT_THROW(generate_dataset(cfg), DataError);
    cfg = default_generator_config();
    cfg.families[0].count = 0;
    EXPECT_THROW(cfg.validate(), DataError);
    cfg = default_generator_config();
    cfg.benign.std[3] = -1.0;
    EXPECT_THROW(generator_config_from_json(generator_config_to_json(cfg)), DataError);
}
