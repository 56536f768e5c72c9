#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace triage {

inline constexpr std::size_t kFeatureCount = 16;

using FeatureVector = std::array<double, kFeatureCount>;

enum class Unit : std::uint8_t { percent, count, kilobytes };

struct FeatureSchema {
    std::array<std::string_view, kFeatureCount> names;
    std::array<Unit, kFeatureCount> units;

    std::size_t size() const { return names.size(); }
    std::optional<std::size_t> find(std::string_view name) const;
    // Throws DataError for names outside the schema.
    std::size_t index_of(std::string_view name) const;

    bool operator==(const FeatureSchema&) const = default;
};

// The fixed 16-feature CPU/memory telemetry vocabulary.
const FeatureSchema& canonical_schema();

std::string_view feature_name(std::size_t index);

enum class FamilyLabel : std::uint8_t {
    benign,
    gold_dream,
    geinimi,
    base_bridge,
    fake_player,
    jsmshider,
    pjapps,
};

inline constexpr std::size_t kLabelCount = 7;

inline constexpr std::array<FamilyLabel, kLabelCount> kAllLabels = {
    FamilyLabel::benign,      FamilyLabel::gold_dream, FamilyLabel::geinimi,
    FamilyLabel::base_bridge, FamilyLabel::fake_player, FamilyLabel::jsmshider,
    FamilyLabel::pjapps,
};

inline constexpr std::array<FamilyLabel, kLabelCount - 1> kMalwareFamilies = {
    FamilyLabel::gold_dream,  FamilyLabel::geinimi,   FamilyLabel::base_bridge,
    FamilyLabel::fake_player, FamilyLabel::jsmshider, FamilyLabel::pjapps,
};

std::string_view to_string(FamilyLabel label);
std::optional<FamilyLabel> try_parse_family(std::string_view text);
// Throws DataError on anything but the seven known labels.
FamilyLabel parse_family(std::string_view text);

inline std::size_t label_index(FamilyLabel label) { return static_cast<std::size_t>(label); }

struct Sample {
    std::string id;
    FamilyLabel label = FamilyLabel::benign;
    FeatureVector features{};

    bool operator==(const Sample&) const = default;
};

struct Dataset {
    std::vector<Sample> samples;

    const FeatureSchema& schema() const { return canonical_schema(); }
    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }

    bool operator==(const Dataset&) const = default;
};

// Checks sample invariants (finite, nonnegative features) and unique,
// CSV-safe ids. Throws DataError.
void validate_dataset(const Dataset& dataset);

// Samples carrying `label`, in dataset order.
Dataset filter_by_label(const Dataset& dataset, FamilyLabel label);

// Shortest decimal that parses back to the same double.
std::string format_real(double value);

// `source` names the input in error messages (typically a path).
Dataset parse_dataset_csv(std::string_view text, std::string_view source = "<csv>");
std::string write_dataset_csv(const Dataset& dataset);

Sample parse_probe_dump(std::string_view text, std::string_view source = "<probe>");

// Reads a whole file; throws DataError naming the path on failure.
std::string read_text_file(const std::string& path);

} // namespace triage
