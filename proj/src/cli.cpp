#include "triage/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <unistd.h>

#include "CLI11.hpp"

#include "triage/datagen.hpp"
#include "triage/error.hpp"

namespace triage::cli {

namespace fs = std::filesystem;

std::string verdict_line(const Verdict& v, std::string_view id) {
    std::string line(id);
    line += '\t';
    line += to_string(v.decision);
    line += '\t';
    line += v.family ? std::string(to_string(*v.family)) : "-";
    line += '\t';
    if (v.confidence) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", *v.confidence);
        line += buf;
    } else {
        line += '-';
    }
    line += "\ttriggered=";
    for (std::size_t i = 0; i < v.triggered.size(); ++i) {
        if (i) line += ',';
        line += to_string(v.triggered[i]);
    }
    line += "\tfeatures=" + std::to_string(v.features_inspected);
    return line;
}

void write_file_atomic(const std::string& path, std::string_view content) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + path + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw DataError("error writing '" + path + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("cannot write '" + path + "'");
    }
}

namespace {

ModelBundle read_model(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const DataError& e) {
        throw ModelError(e.what());
    }
    try {
        return load_bundle(text);
    } catch (const ModelError& e) {
        throw ModelError(path + ": " + e.what());
    }
}

Dataset read_dataset(const std::string& path) { return parse_dataset_csv(read_text_file(path), path); }

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-tier malware triage over CPU/memory telemetry", "triage"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic telemetry dataset");
    std::string gen_config, gen_out;
    std::optional<std::uint64_t> gen_seed;
    bool print_default = false;
    gen->add_option("--config", gen_config, "Generator config JSON (default: built-in)");
    gen->add_option("--seed", gen_seed, "Seed overriding the config's seed");
    gen->add_option("--out", gen_out, "Output CSV path");
    gen->add_flag("--print-default-config", print_default, "Print the built-in generator config");

    // train
    auto* train = app.add_subcommand("train", "Train a model bundle");
    std::string train_data, train_out;
    BundleConfig bcfg;
    train->add_option("--data", train_data, "Training CSV")->required();
    train->add_option("--out", train_out, "Output bundle JSON")->required();
    train->add_option("--variance", bcfg.variance_target, "PCA variance target")->check(CLI::Range(1e-12, 1.0));
    train->add_option("--symptoms", bcfg.symptoms, "Symptoms per family")->check(CLI::Range(1, 16));
    train->add_option("--quantile", bcfg.quantile, "Trigger quantile")->check(CLI::Range(1e-12, 1.0));
    train->add_flag("--benign-gate", bcfg.benign_gate, "Enable the benign pre-gate");
    train->add_option("--learning-rate", bcfg.train.learning_rate)->check(CLI::PositiveNumber);
    train->add_option("--l2", bcfg.train.l2_lambda)->check(CLI::NonNegativeNumber);
    train->add_option("--max-iters", bcfg.train.max_iters)->check(CLI::Range(1, 100000000));
    train->add_option("--grad-tol", bcfg.train.grad_tol)->check(CLI::PositiveNumber);

    // rank
    auto* rank = app.add_subcommand("rank", "Print per-family feature rankings");
    std::string rank_data;
    double rank_variance = kDefaultVarianceTarget;
    rank->add_option("--data", rank_data, "Dataset CSV")->required();
    rank->add_option("--variance", rank_variance, "PCA variance target")->check(CLI::Range(1e-12, 1.0));

    // detect
    auto* detect = app.add_subcommand("detect", "Classify samples through the cascade");
    std::string detect_model, detect_csv, detect_probe;
    detect->add_option("--model", detect_model, "Bundle JSON")->required();
    auto* csv_opt = detect->add_option("--csv", detect_csv, "Batch CSV input");
    auto* probe_opt = detect->add_option("--probe", detect_probe, "Single probe-dump input");
    csv_opt->excludes(probe_opt);
    detect->require_option(2);

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a bundle on a labelled dataset");
    std::string eval_model, eval_data;
    bool eval_json = false, run_all = false;
    eval->add_option("--model", eval_model, "Bundle JSON")->required();
    eval->add_option("--data", eval_data, "Labelled CSV")->required();
    eval->add_flag("--json", eval_json, "Emit JSON instead of a text table");
    eval->add_flag("--run-all", run_all, "Run every specialist (flat ensemble)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (gen->parsed() && !print_default && gen_out.empty())
            throw CLI::RequiredError("--out");
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "triage: " << e.what() << "\n";
        err << app.help();
        return kUsage;
    }

    try {
        if (gen->parsed()) {
            if (print_default) {
                out << generator_config_to_json(default_generator_config());
                return kSuccess;
            }
            GeneratorConfig cfg = gen_config.empty()
                                      ? default_generator_config()
                                      : generator_config_from_json(read_text_file(gen_config));
            if (gen_seed) cfg.seed = *gen_seed;
            write_file_atomic(gen_out, write_dataset_csv(generate_dataset(cfg)));
        } else if (train->parsed()) {
            const Dataset data = read_dataset(train_data);
            write_file_atomic(train_out, save_bundle(train_bundle(data, bcfg)));
        } else if (rank->parsed()) {
            out << format_rankings(family_rankings(read_dataset(rank_data), rank_variance));
        } else if (detect->parsed()) {
            const ModelBundle bundle = read_model(detect_model);
            Dataset input;
            if (!detect_csv.empty()) {
                input = read_dataset(detect_csv);
            } else {
                input.samples.push_back(parse_probe_dump(read_text_file(detect_probe), detect_probe));
            }
            const auto verdicts = classify_all(input, bundle);
            std::string text;
            for (std::size_t i = 0; i < verdicts.size(); ++i)
                text += verdict_line(verdicts[i], input.samples[i].id) + "\n";
            out << text;
        } else if (eval->parsed()) {
            const ModelBundle bundle = read_model(eval_model);
            const EvalReport report = evaluate(read_dataset(eval_data), bundle,
                                               run_all ? CascadeMode::run_all : CascadeMode::triggered_only);
            out << (eval_json ? format_eval_json(report) : format_eval_text(report));
        }
    } catch (const DataError& e) {
        err << "triage: " << e.what() << "\n";
        return kDataError;
    } catch (const ModelError& e) {
        err << "triage: " << e.what() << "\n";
        return kModelError;
    } catch (const NumericError& e) {
        err << "triage: " << e.what() << "\n";
        return kModelError;
    } catch (const std::invalid_argument& e) {
        err << "triage: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "triage: " << e.what() << "\n";
        return kDataError;
    }
    return kSuccess;
}

} // namespace triage::cli
