#include "triage/telemetry.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <span>
#include <sstream>
#include <unordered_set>

#include "triage/error.hpp"

namespace triage {

namespace {

constexpr FeatureSchema kSchema{
    {
        "cpu_total_pct",
        "cpu_user_pct",
        "cpu_kernel_pct",
        "page_minor_faults",
        "page_major_faults",
        "dalvik_heap_alloc_kb",
        "dalvik_heap_free_kb",
        "dalvik_pss_kb",
        "dalvik_private_dirty_kb",
        "so_mmap_pss_kb",
        "so_mmap_private_dirty_kb",
        "so_mmap_shared_dirty_kb",
        "cursor_pss_kb",
        "cursor_private_dirty_kb",
        "ashmem_pss_kb",
        "ashmem_shared_dirty_kb",
    },
    {
        Unit::percent, Unit::percent, Unit::percent, Unit::count,
        Unit::count, Unit::kilobytes, Unit::kilobytes, Unit::kilobytes,
        Unit::kilobytes, Unit::kilobytes, Unit::kilobytes, Unit::kilobytes,
        Unit::kilobytes, Unit::kilobytes, Unit::kilobytes, Unit::kilobytes,
    },
};

constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
    "benign", "gold_dream", "geinimi", "base_bridge", "fake_player", "jsmshider", "pjapps",
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

enum class RealStatus { ok, not_numeric, non_finite, negative };

RealStatus parse_nonnegative_real(std::string_view text, double& out) {
    if (text.empty()) return RealStatus::not_numeric;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) return RealStatus::not_numeric;
    if (!std::isfinite(out)) return RealStatus::non_finite;
    if (out < 0) return RealStatus::negative;
    if (out == 0) out = 0.0; // normalise -0
    return RealStatus::ok;
}

std::string_view status_message(RealStatus s) {
    switch (s) {
    case RealStatus::not_numeric: return "non-numeric value";
    case RealStatus::non_finite: return "non-finite value";
    case RealStatus::negative: return "negative value";
    case RealStatus::ok: break;
    }
    return "ok";
}

bool id_is_csv_safe(std::string_view id) {
    if (id.empty() || id != trim(id)) return false;
    return id.find_first_of(",\n\r") == std::string_view::npos;
}

// Iterates lines, yielding (1-based line number, content without '\n').
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        fn(++line_no, text.substr(start, end - start));
        start = end + 1;
    }
}

} // namespace

std::optional<std::size_t> FeatureSchema::find(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    return std::nullopt;
}

std::size_t FeatureSchema::index_of(std::string_view name) const {
    if (auto idx = find(name)) return *idx;
    throw DataError("unknown feature '" + std::string(name) + "'");
}

const FeatureSchema& canonical_schema() { return kSchema; }

std::string_view feature_name(std::size_t index) { return kSchema.names.at(index); }

std::string_view to_string(FamilyLabel label) { return kLabelNames.at(label_index(label)); }

std::optional<FamilyLabel> try_parse_family(std::string_view text) {
    for (std::size_t i = 0; i < kLabelNames.size(); ++i)
        if (kLabelNames[i] == text) return kAllLabels[i];
    return std::nullopt;
}

FamilyLabel parse_family(std::string_view text) {
    if (auto label = try_parse_family(text)) return *label;
    throw DataError("unknown label '" + std::string(text) + "'");
}

void validate_dataset(const Dataset& dataset) {
    std::unordered_set<std::string_view> ids;
    for (const auto& s : dataset.samples) {
        if (!id_is_csv_safe(s.id)) throw DataError("invalid sample id '" + s.id + "'");
        if (!ids.insert(s.id).second) throw DataError("duplicate id '" + s.id + "'");
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            if (!std::isfinite(s.features[f]) || s.features[f] < 0)
                throw DataError("sample '" + s.id + "': invalid value for " +
                                std::string(feature_name(f)));
        }
    }
}

Dataset filter_by_label(const Dataset& dataset, FamilyLabel label) {
    Dataset out;
    for (const auto& s : dataset.samples)
        if (s.label == label) out.samples.push_back(s);
    return out;
}

std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::logic_error("format_real: buffer too small");
    return std::string(buf, ptr);
}

Dataset parse_dataset_csv(std::string_view text, std::string_view source) {
    const std::string src(source);
    Dataset dataset;
    std::unordered_set<std::string> ids;
    bool header_seen = false;

    for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string where = src + ": line " + std::to_string(line_no);

        if (!header_seen) {
            header_seen = true;
            auto cols = split(line, ',');
            if (cols.size() != kFeatureCount + 2)
                throw DataError(where + ": header has " + std::to_string(cols.size()) +
                                " columns, expected " + std::to_string(kFeatureCount + 2));
            if (cols[0] != "id") throw DataError(where + ": header column 1 must be 'id'");
            if (cols[1] != "label") throw DataError(where + ": header column 2 must be 'label'");
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                if (cols[f + 2] != kSchema.names[f])
                    throw DataError(where + ": header column " + std::to_string(f + 3) + " is '" +
                                    std::string(cols[f + 2]) + "', expected " +
                                    std::string(kSchema.names[f]));
            }
            return;
        }
        if (trim(line).empty()) return;

        auto cols = split(line, ',');
        if (cols.size() != kFeatureCount + 2)
            throw DataError(where + ": expected " + std::to_string(kFeatureCount + 2) +
                            " fields, found " + std::to_string(cols.size()));
        Sample sample;
        if (!id_is_csv_safe(cols[0])) throw DataError(where + ", id: invalid id");
        sample.id = std::string(cols[0]);
        auto label = try_parse_family(cols[1]);
        if (!label)
            throw DataError(where + ", label: unknown label '" + std::string(cols[1]) + "'");
        sample.label = *label;
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            auto status = parse_nonnegative_real(cols[f + 2], sample.features[f]);
            if (status != RealStatus::ok)
                throw DataError(src + ": " + std::string(status_message(status)) + ", line " +
                                std::to_string(line_no) + ", " + std::string(kSchema.names[f]));
        }
        if (!ids.insert(sample.id).second)
            throw DataError(where + ", id: duplicate id '" + sample.id + "'");
        dataset.samples.push_back(std::move(sample));
    });

    if (!header_seen) throw DataError(src + ": missing header line");
    return dataset;
}

std::string write_dataset_csv(const Dataset& dataset) {
    std::string out = "id,label";
    for (auto name : kSchema.names) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (const auto& s : dataset.samples) {
        out += s.id;
        out += ',';
        out += to_string(s.label);
        for (double v : s.features) {
            out += ',';
            out += format_real(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

struct SectionSpec {
    std::string_view name;
    // Probe field -> schema index; unmapped fields are accepted and ignored.
    std::array<std::pair<std::string_view, int>, 5> fields;
};

constexpr std::array<SectionSpec, 4> kSections = {{
    {"Dalvik", {{{"pss", 7}, {"private_dirty", 8}, {"shared_dirty", -1}, {"heap_alloc", 5}, {"heap_free", 6}}}},
    {"SoMmap", {{{"pss", 9}, {"private_dirty", 10}, {"shared_dirty", 11}, {"heap_alloc", -1}, {"heap_free", -1}}}},
    {"Cursor", {{{"pss", 12}, {"private_dirty", 13}, {"shared_dirty", -1}, {"heap_alloc", -1}, {"heap_free", -1}}}},
    {"Ashmem", {{{"pss", 14}, {"private_dirty", -1}, {"shared_dirty", 15}, {"heap_alloc", -1}, {"heap_free", -1}}}},
}};

} // namespace

Sample parse_probe_dump(std::string_view text, std::string_view source) {
    const std::string src(source);
    Sample sample;
    std::optional<std::string> id;
    std::optional<FamilyLabel> label;
    std::array<bool, kFeatureCount> seen{};
    std::unordered_set<std::string> records;

    auto set_feature = [&](std::size_t index, double value, const std::string& where) {
        if (seen[index])
            throw DataError(where + ": duplicate feature line for " +
                            std::string(kSchema.names[index]));
        seen[index] = true;
        sample.features[index] = value;
    };

    for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
        const std::string where = src + ": line " + std::to_string(line_no);
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') return;

        if (line.starts_with("id=")) {
            if (id) throw DataError(where + ": duplicate id line");
            auto value = line.substr(3);
            if (!id_is_csv_safe(value)) throw DataError(where + ": malformed id");
            id = std::string(value);
            return;
        }
        if (line.starts_with("label=")) {
            if (label) throw DataError(where + ": duplicate label line");
            auto parsed = try_parse_family(line.substr(6));
            if (!parsed)
                throw DataError(where + ": unknown label '" + std::string(line.substr(6)) + "'");
            label = *parsed;
            return;
        }

        auto tokens = split_ws(line);
        const std::string_view head = tokens.front();
        if (head.find('=') != std::string_view::npos)
            throw DataError(where + ": malformed line '" + std::string(line) + "'");
        if (!records.insert(std::string(head)).second)
            throw DataError(where + ": duplicate feature line '" + std::string(head) + "'");

        // Parses key=value tokens; rejects keys not in `allowed` and repeats.
        auto parse_fields = [&](std::span<const std::string_view> allowed) {
            std::vector<std::pair<std::string_view, double>> kv;
            for (std::size_t t = 1; t < tokens.size(); ++t) {
                auto eq = tokens[t].find('=');
                if (eq == std::string_view::npos || eq == 0)
                    throw DataError(where + ": malformed field '" + std::string(tokens[t]) + "'");
                auto key = tokens[t].substr(0, eq);
                bool known = false;
                for (auto a : allowed) known = known || a == key;
                if (!known)
                    throw DataError(where + ": unknown field '" + std::string(key) + "' in " +
                                    std::string(head));
                for (const auto& [k, v] : kv)
                    if (k == key)
                        throw DataError(where + ": repeated field '" + std::string(key) + "'");
                double value = 0;
                auto status = parse_nonnegative_real(tokens[t].substr(eq + 1), value);
                if (status != RealStatus::ok)
                    throw DataError(where + ": " + std::string(status_message(status)) + " for " +
                                    std::string(key));
                kv.emplace_back(key, value);
            }
            return kv;
        };
        auto require = [&](const std::vector<std::pair<std::string_view, double>>& kv,
                           std::string_view key) {
            for (const auto& [k, v] : kv)
                if (k == key) return v;
            throw DataError(where + ": malformed line, " + std::string(head) + " requires " +
                            std::string(key));
        };

        if (head == "CPU") {
            constexpr std::array<std::string_view, 3> keys = {"total", "user", "kernel"};
            auto kv = parse_fields(keys);
            for (std::size_t i = 0; i < keys.size(); ++i) set_feature(i, require(kv, keys[i]), where);
            return;
        }
        if (head == "Faults") {
            constexpr std::array<std::string_view, 2> keys = {"minor", "major"};
            auto kv = parse_fields(keys);
            set_feature(3, require(kv, "minor"), where);
            set_feature(4, require(kv, "major"), where);
            return;
        }
        for (const auto& section : kSections) {
            if (section.name != head) continue;
            std::array<std::string_view, 5> keys;
            for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = section.fields[i].first;
            auto kv = parse_fields(keys);
            require(kv, "pss");
            require(kv, "private_dirty");
            require(kv, "shared_dirty");
            if (head == "Dalvik") {
                require(kv, "heap_alloc");
                require(kv, "heap_free");
            }
            for (const auto& [key, value] : kv) {
                for (const auto& [name, index] : section.fields)
                    if (name == key && index >= 0)
                        set_feature(static_cast<std::size_t>(index), value, where);
            }
            return;
        }
        throw DataError(where + ": unknown section '" + std::string(head) + "'");
    });

    if (!id) throw DataError(src + ": missing id line");
    for (std::size_t f = 0; f < kFeatureCount; ++f)
        if (!seen[f])
            throw DataError(src + ": missing feature " + std::string(kSchema.names[f]));
    sample.id = *id;
    sample.label = label.value_or(FamilyLabel::benign);
    return sample;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw DataError("error reading '" + path + "'");
    return ss.str();
}

} // namespace triage
