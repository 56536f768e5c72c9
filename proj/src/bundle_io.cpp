#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "json.hpp"

#include "triage/error.hpp"
#include "triage/pipeline.hpp"

namespace triage {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ModelError("invalid bundle: " + what); }

void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void check_signature(const FamilySignature& sig, const std::string& where) {
    require(!sig.symptoms.empty(), where + ": no symptoms");
    std::set<std::size_t> distinct(sig.symptoms.begin(), sig.symptoms.end());
    require(distinct.size() == sig.symptoms.size(), where + ": duplicate symptom index");
    require(*distinct.rbegin() < kFeatureCount, where + ": symptom index out of range");
    require(sig.mu.size() == sig.symptoms.size() && sig.sigma.size() == sig.symptoms.size(),
            where + ": mu/sigma length mismatch");
    require(all_finite(sig.mu) && all_finite(sig.sigma), where + ": non-finite mu/sigma");
    for (double s : sig.sigma) require(s >= kSigmaFloor, where + ": sigma below floor");
    require(std::isfinite(sig.tau) && sig.tau >= 0.0, where + ": tau must be finite and >= 0");
    require(sig.quantile > 0.0 && sig.quantile <= 1.0, where + ": quantile out of range");
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
    require(s.size() == 16 && s.find_first_not_of("0123456789abcdef") == std::string::npos,
            "standardizer_ref must be 16 lowercase hex digits");
    return std::stoull(s, nullptr, 16);
}

FamilyLabel label_from_json(const Json& j) {
    auto label = try_parse_family(j.get<std::string>());
    if (!label) fail("unknown family '" + j.get<std::string>() + "'");
    return *label;
}

Json signature_to_json(const FamilySignature& sig) {
    return Json{{"family", to_string(sig.family)}, {"symptoms", sig.symptoms}, {"mu", sig.mu},
                {"sigma", sig.sigma},             {"tau", sig.tau},           {"quantile", sig.quantile}};
}

FamilySignature signature_from_json(const Json& j) {
    FamilySignature sig;
    sig.family = label_from_json(j.at("family"));
    sig.symptoms = j.at("symptoms").get<std::vector<std::size_t>>();
    sig.mu = j.at("mu").get<std::vector<double>>();
    sig.sigma = j.at("sigma").get<std::vector<double>>();
    sig.tau = j.at("tau").get<double>();
    sig.quantile = j.at("quantile").get<double>();
    return sig;
}

} // namespace

void validate_bundle(const ModelBundle& b) {
    require(b.version == ModelBundle::kVersion, "unsupported version " + std::to_string(b.version));
    try {
        b.config.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("config: ") + e.what());
    }

    const Standardizer& s = b.standardizer;
    require(s.mean.size() == kFeatureCount && s.std.size() == kFeatureCount &&
                s.constant_mask.size() == kFeatureCount,
            "standardizer must have 16 entries");
    require(all_finite(s.mean) && all_finite(s.std), "standardizer has non-finite values");
    for (double v : s.std) require(v > 0.0, "standardizer std must be > 0");

    std::set<FamilyLabel> ranked, signed_, specialised;
    for (const auto& [family, r] : b.rankings) {
        const std::string where = "ranking " + std::string(to_string(family));
        require(family != FamilyLabel::benign && r.family == family, where + ": bad family");
        require(r.entries.size() == kFeatureCount, where + ": must have 16 entries");
        std::set<std::size_t> seen;
        for (std::size_t i = 0; i < r.entries.size(); ++i) {
            const auto& e = r.entries[i];
            require(e.feature < kFeatureCount && seen.insert(e.feature).second, where + ": not a permutation");
            require(std::isfinite(e.score) && e.score >= 0.0, where + ": invalid score");
            if (i > 0) {
                const auto& p = r.entries[i - 1];
                require(p.score > e.score || (p.score == e.score && p.feature < e.feature),
                        where + ": entries out of order");
            }
        }
        ranked.insert(family);
    }

    for (std::size_t i = 0; i < b.signatures.size(); ++i) {
        const auto& sig = b.signatures[i];
        const std::string where = "signature " + std::string(to_string(sig.family));
        require(sig.family != FamilyLabel::benign, where + ": benign is not a family signature");
        check_signature(sig, where);
        require(sig.symptoms.size() == b.config.symptoms, where + ": symptom count differs from config");
        require(i == 0 || b.signatures[i - 1].family < sig.family, "signatures out of order");
        signed_.insert(sig.family);
    }

    const std::uint64_t ref = fingerprint(s);
    for (const auto& [family, m] : b.specialists) {
        const std::string where = "specialist " + std::string(to_string(family));
        require(family != FamilyLabel::benign && m.family == family, where + ": bad family");
        require(m.weights.size() == kFeatureCount, where + ": must have 16 weights");
        require(all_finite(m.weights) && std::isfinite(m.bias), where + ": non-finite weights");
        require(m.standardizer_ref == ref, where + ": trained against a different standardizer");
        specialised.insert(family);
    }

    require(!ranked.empty(), "no families");
    require(ranked == signed_ && ranked == specialised,
            "rankings, signatures and specialists cover different families");

    require(b.benign_signature.has_value() == b.config.benign_gate,
            "benign signature must be present iff benign_gate is set");
    if (b.benign_signature) {
        require(b.benign_signature->family == FamilyLabel::benign, "benign signature has a family label");
        check_signature(*b.benign_signature, "benign signature");
    }
}

std::string save_bundle(const ModelBundle& b) {
    Json j;
    j["version"] = b.version;
    auto schema = Json::array();
    for (auto name : canonical_schema().names) schema.push_back(name);
    j["schema"] = schema;
    j["standardizer"] = {{"mean", b.standardizer.mean},
                         {"std", b.standardizer.std},
                         {"constant_mask", b.standardizer.constant_mask}};

    auto rankings = Json::object();
    for (const auto& [family, r] : b.rankings) {
        auto entries = Json::array();
        for (const auto& e : r.entries) entries.push_back(Json::array({e.feature, e.score}));
        rankings[std::string(to_string(family))] = entries;
    }
    j["rankings"] = rankings;

    auto sigs = Json::array();
    for (const auto& sig : b.signatures) sigs.push_back(signature_to_json(sig));
    j["signatures"] = sigs;
    j["benign_signature"] = b.benign_signature ? signature_to_json(*b.benign_signature) : Json(nullptr);

    auto specialists = Json::object();
    for (const auto& [family, m] : b.specialists) {
        specialists[std::string(to_string(family))] = {
            {"weights", m.weights},
            {"bias", m.bias},
            {"standardizer_ref", hex64(m.standardizer_ref)},
            {"train_meta",
             {{"iterations_run", m.meta.iterations_run},
              {"final_grad_inf_norm", m.meta.final_grad_inf_norm},
              {"final_loss", m.meta.final_loss}}},
        };
    }
    j["specialists"] = specialists;

    const auto& c = b.config;
    j["config"] = {
        {"variance_target", c.variance_target},
        {"symptoms", c.symptoms},
        {"quantile", c.quantile},
        {"benign_gate", c.benign_gate},
        {"train",
         {{"learning_rate", c.train.learning_rate},
          {"l2_lambda", c.train.l2_lambda},
          {"max_iters", c.train.max_iters},
          {"grad_tol", c.train.grad_tol}}},
    };
    return j.dump(2) + "\n";
}

ModelBundle load_bundle(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError("bundle parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }

    ModelBundle b;
    try {
        require(j.is_object(), "top level must be an object");
        const int version = j.at("version").get<int>();
        if (version != ModelBundle::kVersion)
            throw ModelError("unsupported bundle version " + std::to_string(version) + " (expected " +
                             std::to_string(ModelBundle::kVersion) + ")");
        b.version = version;

        const auto names = j.at("schema").get<std::vector<std::string>>();
        require(names.size() == kFeatureCount, "schema must list 16 features");
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            require(names[f] == canonical_schema().names[f], "schema mismatch at feature " + std::to_string(f));

        const Json& s = j.at("standardizer");
        b.standardizer.mean = s.at("mean").get<std::vector<double>>();
        b.standardizer.std = s.at("std").get<std::vector<double>>();
        b.standardizer.constant_mask = s.at("constant_mask").get<std::vector<bool>>();

        for (const auto& [key, entries] : j.at("rankings").items()) {
            FeatureRanking r;
            r.family = label_from_json(Json(key));
            for (const auto& e : entries) {
                require(e.is_array() && e.size() == 2, "ranking entry must be [feature, score]");
                r.entries.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>()});
            }
            require(b.rankings.emplace(r.family, r).second, "duplicate ranking");
        }

        for (const auto& sig : j.at("signatures")) b.signatures.push_back(signature_from_json(sig));
        if (const Json& g = j.at("benign_signature"); !g.is_null()) b.benign_signature = signature_from_json(g);

        for (const auto& [key, m] : j.at("specialists").items()) {
            SpecialistModel sm;
            sm.family = label_from_json(Json(key));
            sm.weights = m.at("weights").get<std::vector<double>>();
            sm.bias = m.at("bias").get<double>();
            sm.standardizer_ref = parse_hex64(m.at("standardizer_ref").get<std::string>());
            const Json& meta = m.at("train_meta");
            sm.meta.iterations_run = meta.at("iterations_run").get<int>();
            sm.meta.final_grad_inf_norm = meta.at("final_grad_inf_norm").get<double>();
            sm.meta.final_loss = meta.at("final_loss").get<double>();
            require(b.specialists.emplace(sm.family, sm).second, "duplicate specialist");
        }

        const Json& c = j.at("config");
        b.config.variance_target = c.at("variance_target").get<double>();
        b.config.symptoms = c.at("symptoms").get<std::size_t>();
        b.config.quantile = c.at("quantile").get<double>();
        b.config.benign_gate = c.at("benign_gate").get<bool>();
        const Json& t = c.at("train");
        b.config.train.learning_rate = t.at("learning_rate").get<double>();
        b.config.train.l2_lambda = t.at("l2_lambda").get<double>();
        b.config.train.max_iters = t.at("max_iters").get<int>();
        b.config.train.grad_tol = t.at("grad_tol").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(e.what());
    }
    validate_bundle(b);
    return b;
}

} // namespace triage
