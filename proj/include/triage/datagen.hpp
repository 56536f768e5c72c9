#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "triage/telemetry.hpp"

namespace triage {

// xorshift64* generator. Seed 0 is remapped so the state is never zero.
class Prng {
public:
    static constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kMultiplier = 0x2545F4914F6CDD1DULL;

    explicit Prng(std::uint64_t seed) : state_(seed == 0 ? kZeroSeedReplacement : seed) {}

    std::uint64_t next_u64() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * kMultiplier;
    }

    // Box-Muller cosine branch from two consecutive draws; the sine twin is dropped.
    double gaussian();

    std::uint64_t state() const { return state_; }

    bool operator==(const Prng&) const = default;

private:
    std::uint64_t state_;
};

struct GeneratorGroup {
    FamilyLabel label = FamilyLabel::benign;
    std::size_t count = 0;
    FeatureVector mean{};
    FeatureVector std{};

    bool operator==(const GeneratorGroup&) const = default;
};

struct GeneratorConfig {
    GeneratorGroup benign;
    std::vector<GeneratorGroup> families;
    std::uint64_t seed = 1;

    // Throws DataError.
    void validate() const;
    bool operator==(const GeneratorConfig&) const = default;
};

inline constexpr std::size_t kDefaultFamilyCount = 53;   // 6 x 53 = 318 malware samples
inline constexpr std::size_t kDefaultBenignCount = 318;

// Each family's symptom features have std inflated over benign (6x, with a
// distinct lead feature at 12x) and means shifted by 3 family std.
GeneratorConfig default_generator_config();

// Features whose configured family std exceeds the benign std.
std::vector<std::size_t> inflated_features(const GeneratorConfig& cfg, FamilyLabel family);

std::string generator_config_to_json(const GeneratorConfig& cfg);
// Throws DataError on malformed documents or invalid configs.
GeneratorConfig generator_config_from_json(std::string_view text);

// Benign group first, then families in declared order; sample ids are
// `<label>_<index>`; features are max(0, mean + std * gaussian).
Dataset generate_dataset(const GeneratorConfig& cfg);

} // namespace triage
