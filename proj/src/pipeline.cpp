#include "triage/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "triage/error.hpp"

namespace triage {

void BundleConfig::validate() const {
    if (!(variance_target > 0.0 && variance_target <= 1.0))
        throw std::invalid_argument("variance target must be in (0, 1]");
    if (symptoms < 1 || symptoms > kFeatureCount)
        throw std::invalid_argument("symptom count must be in [1, 16]");
    if (!(quantile > 0.0 && quantile <= 1.0))
        throw std::invalid_argument("quantile must be in (0, 1]");
    train.validate();
}

std::string_view to_string(Decision d) {
    switch (d) {
    case Decision::benign: return "benign";
    case Decision::suspicious: return "suspicious";
    case Decision::infected: return "infected";
    }
    return "?";
}

ModelBundle train_bundle(const Dataset& dataset, const BundleConfig& config, Execution exec) {
    config.validate();
    validate_dataset(dataset);

    const Dataset benign = filter_by_label(dataset, FamilyLabel::benign);
    if (benign.empty()) throw DataError("training data has no benign samples");
    if (config.benign_gate && benign.size() < 2)
        throw DataError("benign gate needs at least 2 benign samples");

    ModelBundle bundle;
    bundle.config = config;
    bundle.standardizer = fit_standardizer(dataset);
    bundle.rankings = family_rankings(dataset, config.variance_target, exec);
    if (bundle.rankings.empty()) throw DataError("training data has no malware families");

    std::vector<FamilyLabel> families;
    for (const auto& [family, ranking] : bundle.rankings) families.push_back(family);

    std::vector<FamilySignature> signatures(families.size());
    std::vector<SpecialistModel> specialists(families.size());
    std::vector<std::exception_ptr> errors(families.size());
    const auto count = static_cast<std::ptrdiff_t>(families.size());
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const FamilyLabel family = families[u];
        try {
            const Dataset members = filter_by_label(dataset, family);
            signatures[u] = build_signature(family, members.samples, bundle.standardizer,
                                            top_m_symptoms(bundle.rankings.at(family), config.symptoms),
                                            config.quantile);
            specialists[u] = train_specialist(family, dataset, bundle.standardizer, config.train, exec);
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    bundle.signatures = std::move(signatures);
    for (auto& s : specialists) bundle.specialists.emplace(s.family, std::move(s));

    if (config.benign_gate) {
        std::set<std::size_t> all;
        for (const auto& sig : bundle.signatures) all.insert(sig.symptoms.begin(), sig.symptoms.end());
        bundle.benign_signature =
            build_signature(FamilyLabel::benign, benign.samples, bundle.standardizer,
                            std::vector<std::size_t>(all.begin(), all.end()), config.quantile);
    }
    return bundle;
}

Verdict classify(const Sample& x, const ModelBundle& bundle, CascadeMode mode) {
    const FamilySignature* gate = bundle.benign_signature ? &*bundle.benign_signature : nullptr;
    const TriggerReport report = run_monitor(x, bundle.signatures, bundle.standardizer, gate);

    Verdict v;
    v.features_inspected = report.features_inspected;
    for (const auto& [family, score] : report.triggered) v.triggered.push_back(family);

    std::vector<FamilyLabel> candidates;
    if (mode == CascadeMode::run_all) {
        for (const auto& [family, model] : bundle.specialists) candidates.push_back(family);
        v.features_inspected += kFeatureCount * candidates.size();
    } else {
        if (v.triggered.empty()) return v;
        candidates = v.triggered;
        std::sort(candidates.begin(), candidates.end());
        v.features_inspected += kFeatureCount;
    }

    const std::vector<double> z = apply_standardizer(bundle.standardizer, x.features);
    std::optional<FamilyLabel> best;
    double best_p = -1.0;
    // Candidates are in enumeration order, so strict > keeps the earliest on ties.
    for (FamilyLabel family : candidates) {
        const double p = predict_prob_standardized(bundle.specialists.at(family), z);
        if (p > best_p) {
            best_p = p;
            best = family;
        }
    }
    if (best && best_p >= 0.5) {
        v.decision = Decision::infected;
        v.family = best;
        v.confidence = best_p;
    } else {
        v.decision = v.triggered.empty() ? Decision::benign : Decision::suspicious;
    }
    return v;
}

std::vector<Verdict> classify_all(const Dataset& dataset, const ModelBundle& bundle,
                                  CascadeMode mode, Execution exec) {
    std::vector<Verdict> out(dataset.size());
    const auto n = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out[u] = classify(dataset.samples[u], bundle, mode);
    }
    return out;
}

std::size_t EvalReport::row_total(FamilyLabel label) const {
    std::size_t s = 0;
    for (std::size_t c : confusion[label_index(label)]) s += c;
    return s;
}

EvalReport summarize(const Dataset& dataset, const std::vector<Verdict>& verdicts) {
    if (dataset.size() != verdicts.size()) throw std::invalid_argument("summarize: size mismatch");
    EvalReport r;
    r.total = dataset.size();
    if (r.total == 0) throw DataError("evaluation dataset is empty");

    std::size_t correct = 0, triggered = 0, benign_verdicts = 0, malware = 0, own_triggered = 0;
    double features = 0.0, benign_features = 0.0;
    for (std::size_t i = 0; i < r.total; ++i) {
        const Sample& s = dataset.samples[i];
        const Verdict& v = verdicts[i];
        std::size_t column = kSuspiciousColumn;
        if (v.decision == Decision::benign) column = label_index(FamilyLabel::benign);
        if (v.decision == Decision::infected) column = label_index(*v.family);
        ++r.confusion[label_index(s.label)][column];
        correct += column == label_index(s.label);

        features += static_cast<double>(v.features_inspected);
        triggered += !v.triggered.empty();
        if (v.decision == Decision::benign) {
            ++benign_verdicts;
            benign_features += static_cast<double>(v.features_inspected);
        }
        if (s.label != FamilyLabel::benign) {
            ++malware;
            own_triggered += std::find(v.triggered.begin(), v.triggered.end(), s.label) != v.triggered.end();
        }
    }
    const double n = static_cast<double>(r.total);
    r.accuracy = static_cast<double>(correct) / n;
    r.mean_features_inspected = features / n;
    r.mean_features_inspected_benign_verdict = benign_verdicts ? benign_features / static_cast<double>(benign_verdicts) : 0.0;
    r.trigger_rate = static_cast<double>(triggered) / n;
    r.true_family_trigger_rate = malware ? static_cast<double>(own_triggered) / static_cast<double>(malware) : 0.0;

    for (std::size_t c = 0; c < kLabelCount; ++c) {
        std::size_t col = 0, row = 0;
        for (std::size_t t = 0; t < kLabelCount; ++t) col += r.confusion[t][c];
        for (std::size_t p = 0; p < kOutcomeColumns; ++p) row += r.confusion[c][p];
        r.precision[c] = col ? static_cast<double>(r.confusion[c][c]) / static_cast<double>(col) : 0.0;
        r.recall[c] = row ? static_cast<double>(r.confusion[c][c]) / static_cast<double>(row) : 0.0;
    }
    return r;
}

EvalReport evaluate(const Dataset& dataset, const ModelBundle& bundle, CascadeMode mode, Execution exec) {
    if (dataset.empty()) throw DataError("evaluation dataset is empty");
    return summarize(dataset, classify_all(dataset, bundle, mode, exec));
}

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string pad(std::string_view s, std::size_t width, bool right = false) {
    std::string out;
    if (right && s.size() < width) out.append(width - s.size(), ' ');
    out += s;
    if (!right && s.size() < width) out.append(width - s.size(), ' ');
    return out;
}

} // namespace

std::string format_eval_text(const EvalReport& r) {
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) {
        out += pad(key, 40) + value + "\n";
    };
    line("samples", std::to_string(r.total));
    line("accuracy", fixed4(r.accuracy));
    line("trigger_rate", fixed4(r.trigger_rate));
    line("true_family_trigger_rate", fixed4(r.true_family_trigger_rate));
    line("mean_features_inspected", fixed4(r.mean_features_inspected));
    line("mean_features_inspected_benign_verdict", fixed4(r.mean_features_inspected_benign_verdict));

    constexpr std::size_t w = 12;
    out += "\nconfusion (rows: true label, columns: outcome)\n";
    out += pad("", w);
    for (FamilyLabel l : kAllLabels) out += pad(to_string(l), w, true);
    out += pad("suspicious", w, true) + "\n";
    for (FamilyLabel t : kAllLabels) {
        out += pad(to_string(t), w);
        for (std::size_t c : r.confusion[label_index(t)]) out += pad(std::to_string(c), w, true);
        out += "\n";
    }

    out += "\n" + pad("label", w) + pad("precision", w, true) + pad("recall", w, true) + "\n";
    for (FamilyLabel l : kAllLabels) {
        out += pad(to_string(l), w) + pad(fixed4(r.precision[label_index(l)]), w, true) +
               pad(fixed4(r.recall[label_index(l)]), w, true) + "\n";
    }
    return out;
}

std::string format_eval_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["samples"] = r.total;
    j["accuracy"] = r.accuracy;
    j["trigger_rate"] = r.trigger_rate;
    j["true_family_trigger_rate"] = r.true_family_trigger_rate;
    j["mean_features_inspected"] = r.mean_features_inspected;
    j["mean_features_inspected_benign_verdict"] = r.mean_features_inspected_benign_verdict;
    auto columns = nlohmann::ordered_json::array();
    for (FamilyLabel l : kAllLabels) columns.push_back(to_string(l));
    columns.push_back("suspicious");
    j["columns"] = columns;
    auto confusion = nlohmann::ordered_json::object();
    auto per_label = nlohmann::ordered_json::object();
    for (FamilyLabel l : kAllLabels) {
        const std::string key(to_string(l));
        confusion[key] = r.confusion[label_index(l)];
        per_label[key] = {{"precision", r.precision[label_index(l)]}, {"recall", r.recall[label_index(l)]}};
    }
    j["confusion"] = confusion;
    j["per_label"] = per_label;
    return j.dump(2) + "\n";
}

} // namespace triage
