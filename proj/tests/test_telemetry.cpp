#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "triage/datagen.hpp"
#include "triage/error.hpp"
#include "triage/telemetry.hpp"

using namespace triage;

namespace {

std::string zero_row(const std::string& id, const std::string& label) {
    std::string row = id + "," + label;
    for (std::size_t i = 0; i < kFeatureCount; ++i) row += ",0";
    return row + "\n";
}

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

const char* kProbe = R"(id=app1
label=pjapps
CPU total=12.5 user=8.0 kernel=4.5
Faults minor=120 major=3
Dalvik pss=1 private_dirty=2 shared_dirty=3 heap_alloc=4 heap_free=5
SoMmap pss=6 private_dirty=7 shared_dirty=8
Cursor pss=9 private_dirty=10 shared_dirty=11
Ashmem pss=12 private_dirty=13 shared_dirty=14
)";

} // namespace

TEST(Schema, CanonicalOrder) {
    const auto& s = canonical_schema();
    ASSERT_EQ(s.size(), 16u);
    EXPECT_EQ(s.names[4], "page_major_faults");
    EXPECT_EQ(s.names[12], "cursor_pss_kb");
    EXPECT_EQ(s.names[0], "cpu_total_pct");
    EXPECT_EQ(s.names[15], "ashmem_shared_dirty_kb");
    EXPECT_EQ(&canonical_schema(), &s);
    EXPECT_EQ(canonical_schema(), s);
    EXPECT_EQ(s.units[0], Unit::percent);
    EXPECT_EQ(s.units[3], Unit::count);
    EXPECT_EQ(s.units[12], Unit::kilobytes);
}

TEST(Schema, LookupIsTotalOverNamesAndFailsOtherwise) {
    const auto& s = canonical_schema();
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.index_of(s.names[i]), i);
    EXPECT_THROW(s.index_of("battery_pct"), DataError);
    EXPECT_FALSE(s.find("Page Major Faults").has_value());
}

TEST(Schema, EveryRelevanceTableFeatureMapsToOneIndex) {
    // Features named in the per-family relevance table, with the artifact's
    // naming (Ashmed -> ashmem, .so mmap -> so_mmap_*).
    const std::vector<std::pair<std::string, std::string>> table = {
        {"Page Major Faults", "page_major_faults"},     {"Page Minor Faults", "page_minor_faults"},
        {"Cursor Pss", "cursor_pss_kb"},                {"Cursor Private Dirty", "cursor_private_dirty_kb"},
        {"Dalvik Heap Free", "dalvik_heap_free_kb"},    {"Dalvik Heap Alloc", "dalvik_heap_alloc_kb"},
        {"Dalvik Private Dirty", "dalvik_private_dirty_kb"}, {".so mmap Pss", "so_mmap_pss_kb"},
        {".so mmap Private Dirty", "so_mmap_private_dirty_kb"},
        {".so mmap Shared Dirty", "so_mmap_shared_dirty_kb"},
        {"Ashmed Pss", "ashmem_pss_kb"},                {"Ashmed Shared Dirty", "ashmem_shared_dirty_kb"},
    };
    std::set<std::size_t> indices;
    for (const auto& [display, name] : table) {
        auto idx = canonical_schema().find(name);
        ASSERT_TRUE(idx.has_value()) << display;
        EXPECT_TRUE(indices.insert(*idx).second) << display;
    }
}

TEST(Labels, ParseAllAndRejectOthers) {
    for (FamilyLabel l : kAllLabels) EXPECT_EQ(parse_family(to_string(l)), l);
    EXPECT_EQ(parse_family("geinimi"), FamilyLabel::geinimi);
    EXPECT_THROW(parse_family("Geinimi"), DataError);
    EXPECT_THROW(parse_family("droidkungfu"), DataError);
    EXPECT_THROW(parse_family(""), DataError);
}

TEST(Csv, ParsesZeroRow) {
    const Dataset d = parse_dataset_csv(testutil::csv_header() + zero_row("a1", "benign"));
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.samples[0].id, "a1");
    EXPECT_EQ(d.samples[0].label, FamilyLabel::benign);
    for (double v : d.samples[0].features) EXPECT_EQ(v, 0.0);
}

TEST(Csv, ParsesLabelAndSkipsBlankLines) {
    const Dataset d = parse_dataset_csv(testutil::csv_header() + "\n" + zero_row("x", "geinimi") + "\r\n");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.samples[0].label, FamilyLabel::geinimi);
}

TEST(Csv, NegativeValueReportsLineAndColumn) {
    std::string row = "a1,benign,-1";
    for (std::size_t i = 1; i < kFeatureCount; ++i) row += ",0";
    const auto msg = error_of([&] { parse_dataset_csv(testutil::csv_header() + row + "\n", "in.csv"); });
    EXPECT_NE(msg.find("negative value, line 2, cpu_total_pct"), std::string::npos) << msg;
}

TEST(Csv, RejectsBadInputs) {
    const std::string h = testutil::csv_header();
    // header: wrong order
    std::string swapped = h;
    swapped.replace(swapped.find("cpu_user_pct"), 12, "cpu_XXXX_pct");
    EXPECT_NE(error_of([&] { parse_dataset_csv(swapped); }).find("header column 4"), std::string::npos);
    // header: wrong count
    EXPECT_NE(error_of([&] { parse_dataset_csv("id,label,cpu_total_pct\n"); }).find("header"), std::string::npos);
    // unknown label
    EXPECT_NE(error_of([&] { parse_dataset_csv(h + zero_row("a", "zeus")); }).find("line 2, label"),
              std::string::npos);
    // duplicate id
    EXPECT_NE(error_of([&] { parse_dataset_csv(h + zero_row("a", "benign") + zero_row("a", "pjapps")); })
                  .find("line 3, id: duplicate"),
              std::string::npos);
    // non-numeric and non-finite
    std::string bad = "a,benign,0,0,0,0,abc";
    for (std::size_t i = 5; i < kFeatureCount; ++i) bad += ",0";
    EXPECT_NE(error_of([&] { parse_dataset_csv(h + bad + "\n"); }).find("non-numeric value, line 2, page_major_faults"),
              std::string::npos);
    std::string inf = "a,benign,inf";
    for (std::size_t i = 1; i < kFeatureCount; ++i) inf += ",0";
    EXPECT_NE(error_of([&] { parse_dataset_csv(h + inf + "\n"); }).find("non-finite value"), std::string::npos);
    // wrong field count
    EXPECT_NE(error_of([&] { parse_dataset_csv(h + "a,benign,1\n"); }).find("line 2"), std::string::npos);
    // empty input
    EXPECT_THROW(parse_dataset_csv(""), DataError);
}

TEST(Csv, EmptyDatasetWritesHeaderOnly) {
    EXPECT_EQ(write_dataset_csv(Dataset{}), testutil::csv_header());
}

TEST(Csv, RoundTripProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> value(0.0, 1e6);
    std::uniform_int_distribution<int> exponent(-300, 300);
    std::uniform_int_distribution<std::size_t> label(0, kLabelCount - 1);
    for (int trial = 0; trial < 50; ++trial) {
        Dataset d;
        const int n = trial % 7;
        for (int i = 0; i < n; ++i) {
            Sample s{"s" + std::to_string(trial) + "_" + std::to_string(i), kAllLabels[label(rng)], {}};
            for (double& f : s.features) {
                f = value(rng);
                if (rng() % 4 == 0) f = std::ldexp(value(rng), exponent(rng));
                if (rng() % 9 == 0) f = 0.0;
            }
            d.samples.push_back(s);
        }
        const std::string text = write_dataset_csv(d);
        EXPECT_EQ(parse_dataset_csv(text), d);
        EXPECT_EQ(write_dataset_csv(parse_dataset_csv(text)), text);
    }
}

TEST(Csv, GeneratedDatasetIsByteStable) {
    GeneratorConfig cfg = default_generator_config();
    cfg.seed = 7;
    EXPECT_EQ(write_dataset_csv(generate_dataset(cfg)), write_dataset_csv(generate_dataset(cfg)));
}

TEST(Probe, MapsFieldsOntoSchema) {
    const Sample s = parse_probe_dump(kProbe);
    EXPECT_EQ(s.id, "app1");
    EXPECT_EQ(s.label, FamilyLabel::pjapps);
    const FeatureVector expected = {12.5, 8.0, 4.5, 120, 3, 4, 5, 1, 2, 6, 7, 8, 9, 10, 12, 14};
    EXPECT_EQ(s.features, expected);
}

TEST(Probe, GoldenFixture) {
    const std::string path = std::string(TRIAGE_TEST_DATA_DIR) + "/probe_golden.txt";
    const Sample s = parse_probe_dump(read_text_file(path), path);
    EXPECT_EQ(s.id, "com.example.player");
    EXPECT_EQ(s.label, FamilyLabel::fake_player);
    const FeatureVector expected = {12.5, 8.0, 4.5, 120, 3, 8192, 2048.5, 5120.25,
                                    4800, 3012, 604, 1498, 151.5, 140, 301, 199.75};
    EXPECT_EQ(s.features, expected);
}

TEST(Probe, LabelDefaultsToBenign) {
    std::string text = kProbe;
    text.erase(text.find("label=pjapps\n"), 13);
    EXPECT_EQ(parse_probe_dump(text).label, FamilyLabel::benign);
}

TEST(Probe, MissingSectionNamesFirstMissingFeature) {
    std::string text = kProbe;
    text.erase(text.find("Cursor"), text.find("Ashmem") - text.find("Cursor"));
    EXPECT_NE(error_of([&] { parse_probe_dump(text); }).find("missing feature cursor_pss_kb"), std::string::npos);
}

TEST(Probe, Errors) {
    auto with = [](const std::string& extra) { return std::string(kProbe) + extra; };
    EXPECT_NE(error_of([&] { parse_probe_dump(with("Cursor pss=1 private_dirty=1 shared_dirty=1\n")); })
                  .find("duplicate feature line"),
              std::string::npos);
    EXPECT_NE(error_of([&] { parse_probe_dump(with("Binder pss=1 private_dirty=1 shared_dirty=1\n")); })
                  .find("unknown section 'Binder'"),
              std::string::npos);
    EXPECT_NE(error_of([&] { parse_probe_dump(with("id=again\n")); }).find("duplicate id"), std::string::npos);

    std::string malformed = kProbe;
    malformed.replace(malformed.find("major=3"), 7, "major3");
    EXPECT_NE(error_of([&] { parse_probe_dump(malformed); }).find("malformed field"), std::string::npos);

    std::string negative = kProbe;
    negative.replace(negative.find("user=8.0"), 8, "user=-8");
    EXPECT_NE(error_of([&] { parse_probe_dump(negative); }).find("negative value"), std::string::npos);

    std::string no_heap = kProbe;
    no_heap.replace(no_heap.find(" heap_free=5"), 12, "");
    EXPECT_NE(error_of([&] { parse_probe_dump(no_heap); }).find("requires heap_free"), std::string::npos);

    std::string no_id = kProbe;
    no_id.erase(0, no_id.find('\n') + 1);
    EXPECT_NE(error_of([&] { parse_probe_dump(no_id); }).find("missing id"), std::string::npos);

    std::string unknown_key = kProbe;
    unknown_key.replace(unknown_key.find("kernel=4.5"), 10, "kernel=4.5 iowait=2");
    EXPECT_NE(error_of([&] { parse_probe_dump(unknown_key); }).find("unknown field 'iowait'"), std::string::npos);
}

TEST(Probe, NeverReturnsMissingOrNegativeFeatures) {
    // Drop each line of a valid dump in turn: the parser either fails or
    // (for comment/label lines) returns a complete nonnegative vector.
    std::vector<std::string> lines;
    std::istringstream in(kProbe);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    for (std::size_t skip = 0; skip < lines.size(); ++skip) {
        std::string text;
        for (std::size_t i = 0; i < lines.size(); ++i)
            if (i != skip) text += lines[i] + "\n";
        try {
            const Sample s = parse_probe_dump(text);
            for (double v : s.features) EXPECT_GE(v, 0.0);
            EXPECT_TRUE(lines[skip].starts_with("label="));
        } catch (const DataError&) {
        }
    }
}
