#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triage/kernels.hpp"
#include "triage/monitor.hpp"
#include "triage/pca.hpp"
#include "triage/relevance.hpp"
#include "triage/specialist.hpp"
#include "triage/telemetry.hpp"

namespace triage {

struct BundleConfig {
    double variance_target = kDefaultVarianceTarget;
    std::size_t symptoms = kDefaultSymptomCount;
    double quantile = kDefaultQuantile;
    bool benign_gate = false;
    TrainConfig train;

    void validate() const;
    bool operator==(const BundleConfig&) const = default;
};

// The trained cascade: one global standardizer shared by the monitor and all
// specialists, plus per-family rankings, signatures and specialists.
struct ModelBundle {
    static constexpr int kVersion = 1;

    int version = kVersion;
    Standardizer standardizer;
    RankingMap rankings;
    std::vector<FamilySignature> signatures;          // family enumeration order
    std::optional<FamilySignature> benign_signature;  // set iff config.benign_gate
    std::map<FamilyLabel, SpecialistModel> specialists;
    BundleConfig config;

    const FeatureSchema& schema() const { return canonical_schema(); }
    bool operator==(const ModelBundle&) const = default;
};

// Throws ModelError describing the first violated invariant.
void validate_bundle(const ModelBundle& bundle);

ModelBundle train_bundle(const Dataset& dataset, const BundleConfig& config = {},
                         Execution exec = Execution::parallel);

enum class Decision { benign, suspicious, infected };

std::string_view to_string(Decision d);

struct Verdict {
    Decision decision = Decision::benign;
    std::optional<FamilyLabel> family;
    std::optional<double> confidence;
    std::vector<FamilyLabel> triggered;
    std::size_t features_inspected = 0;

    bool operator==(const Verdict&) const = default;
};

enum class CascadeMode {
    triggered_only,   // specialists run only for families the monitor flags
    run_all,          // every specialist runs (flat-ensemble comparison)
};

Verdict classify(const Sample& x, const ModelBundle& bundle,
                 CascadeMode mode = CascadeMode::triggered_only);

// Verdicts in dataset order.
std::vector<Verdict> classify_all(const Dataset& dataset, const ModelBundle& bundle,
                                  CascadeMode mode = CascadeMode::triggered_only,
                                  Execution exec = Execution::parallel);

inline constexpr std::size_t kOutcomeColumns = kLabelCount + 1;
inline constexpr std::size_t kSuspiciousColumn = kLabelCount;

struct EvalReport {
    // Rows: true label. Columns: predicted label, then a suspicious column.
    std::array<std::array<std::size_t, kOutcomeColumns>, kLabelCount> confusion{};
    std::size_t total = 0;
    double accuracy = 0.0;
    std::array<double, kLabelCount> precision{};
    std::array<double, kLabelCount> recall{};
    double mean_features_inspected = 0.0;
    double mean_features_inspected_benign_verdict = 0.0;
    double trigger_rate = 0.0;
    // Fraction of malware samples whose own family was among the triggered.
    double true_family_trigger_rate = 0.0;

    std::size_t row_total(FamilyLabel label) const;
};

EvalReport summarize(const Dataset& dataset, const std::vector<Verdict>& verdicts);

EvalReport evaluate(const Dataset& dataset, const ModelBundle& bundle,
                    CascadeMode mode = CascadeMode::triggered_only,
                    Execution exec = Execution::parallel);

std::string format_eval_text(const EvalReport& report);
std::string format_eval_json(const EvalReport& report);

// Versioned JSON document; reals written as shortest round-trip decimals.
std::string save_bundle(const ModelBundle& bundle);
// Throws ModelError on parse errors (with byte position), unknown version,
// or invariant violations.
ModelBundle load_bundle(std::string_view text);

} // namespace triage
