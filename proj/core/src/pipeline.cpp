#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "groundbench/analysis.hpp"
#include "groundbench/digest.hpp"
#include "groundbench/errors.hpp"
#include "groundbench/harness.hpp"
#include "groundbench/run.hpp"

namespace groundbench::run {

using nlohmann::json;

namespace {

std::string iso_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
#if defined(_WIN32)
    gmtime_s(&tm, &now);
#else
    gmtime_r(&now, &tm);
#endif
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json read_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

void write_json_file(const std::filesystem::path& path, const json& value) {
    write_text_file(path, value.dump(2) + "\n");
}

// The manifest is written before any model traffic so a crashed run still
// records what was attempted.  run_id is stable for a given config + seed;
// created_at survives later stages.
json& prime_manifest(json& manifest, const RunConfig& config, const RunPaths& paths) {
    if (!manifest.contains("run_id")) {
        const std::string basis = config.to_json().dump();
        manifest["run_id"] = sha256_hex(basis).substr(0, 12);
        manifest["created_at"] = iso_utc_now();
    }
    manifest["tool_version"] = kToolVersion;
    manifest["seed"] = config.seed;
    manifest["mode"] = genesis::to_string(config.mode);
    manifest["prompt_template_version"] = config.prompt_template_version;
    manifest["cache_path"] = paths.cache().string();
    manifest["config"] = config.to_json();
    return manifest;
}

json load_manifest(const RunPaths& paths) {
    if (std::filesystem::exists(paths.manifest())) return read_json_file(paths.manifest());
    return json::object();
}

void mark_stage(json& manifest, const std::string& stage, int exit_code) {
    manifest["stages"][stage] = {{"exit", exit_code}, {"completed_at", iso_utc_now()}};
}

// Usage sections are only replaced when the stage actually hit an upstream
// model; a fully cache-served rerun records nothing and must not wipe the
// numbers from the run that paid for them.
void record_usage(const RunConfig& config, const RunPaths& paths,
                  const gateway::Gateway& gw, const std::string& stage) {
    auto summary = gateway::usage_report(gw.ledger(), config.prices);
    if (summary.rows.empty()) return;
    json usage = std::filesystem::exists(paths.usage()) ? read_json_file(paths.usage())
                                                        : json::object();
    usage[stage] = summary.to_json();
    write_json_file(paths.usage(), usage);
}

gateway::Gateway make_gateway(const RunPaths& paths) {
    gateway::Gateway::Options options;
    options.cache_path = paths.cache();
    return gateway::Gateway(std::move(options));
}

void require_artifact(const std::string& stage, const std::filesystem::path& path,
                      const std::string& hint) {
    if (!std::filesystem::exists(path)) {
        throw MissingArtifact(stage, path.string(), hint);
    }
}

// Stages after generate re-load the benchmark from disk; identity fields come
// from the manifest so every artifact in the run directory agrees on them.
genesis::Benchmark load_run_benchmark(const RunPaths& paths, const std::string& stage) {
    require_artifact(stage, paths.benchmark(), "run the generate stage first");
    auto benchmark = genesis::load_benchmark(paths.benchmark().string());
    json manifest = load_manifest(paths);
    if (manifest.contains("benchmark_id") && manifest["benchmark_id"].is_string()) {
        benchmark.benchmark_id = manifest["benchmark_id"].get<std::string>();
    }
    if (manifest.contains("dataset") && manifest["dataset"].is_string()
        && !manifest["dataset"].get<std::string>().empty()) {
        benchmark.dataset = manifest["dataset"].get<std::string>();
    }
    return benchmark;
}

std::string csv_number(double value) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(6) << value;
    return out.str();
}

}  // namespace

int cmd_generate(const RunConfig& config, const RunPaths& paths) {
    paths.ensure_exists();
    if (config.docs.empty()) {
        throw ConfigError("docs", "generate needs at least one grounding document");
    }
    auto generators = config.resolve(config.generator_names);
    if (generators.empty()) {
        throw ConfigError("generators", "generate needs at least one generator endpoint");
    }

    std::vector<corpus::DocumentTree> docs;
    docs.reserve(config.docs.size());
    for (const auto& doc_path : config.docs) {
        std::filesystem::path p(doc_path);
        docs.push_back(corpus::parse_markdown(read_text_file(p), p.stem().string()));
    }

    json manifest = load_manifest(paths);
    prime_manifest(manifest, config, paths);
    write_json_file(paths.manifest(), manifest);  // before any model traffic

    auto gw = make_gateway(paths);
    genesis::BuildOptions options;
    options.mode = config.mode;
    options.max_topics = config.max_topics;
    options.drop_ceiling = config.drop_ceiling;
    options.dataset = config.dataset;
    auto report = genesis::build_benchmark(gw, docs, config.chunk_policy, generators, options);

    genesis::save_benchmark(report.benchmark, paths.benchmark().string());
    {
        std::ofstream out(paths.dropped(), std::ios::binary | std::ios::trunc);
        for (const auto& drop : report.dropped) {
            out << json{{"chunk_id", drop.chunk_id},
                        {"topic", drop.topic},
                        {"generating_model", drop.generating_model},
                        {"reason", drop.reason}}
                       .dump()
                << "\n";
        }
    }
    record_usage(config, paths, gw, "generate");

    manifest["benchmark_id"] = report.benchmark.benchmark_id;
    manifest["dataset"] = report.benchmark.dataset;
    manifest["denied_sections"] = report.denied_sections;
    manifest["partial"] = report.partial;
    json& counts = manifest["counts"];
    counts["items"] = report.benchmark.items.size();
    counts["dropped"] = report.dropped.size();
    counts["denied_sections"] = report.denied_sections.size();
    const int code = report.partial ? kPartial : kOk;
    mark_stage(manifest, "generate", code);
    write_json_file(paths.manifest(), manifest);
    return code;
}

int cmd_qc(const RunConfig& config, const RunPaths& paths) {
    paths.ensure_exists();
    auto benchmark = load_run_benchmark(paths, "qc");
    if (config.judge_name.empty()) {
        throw ConfigError("judge", "qc needs a judge endpoint");
    }
    const auto judge = *config.find_endpoint(config.judge_name);

    json manifest = load_manifest(paths);
    prime_manifest(manifest, config, paths);
    write_json_file(paths.manifest(), manifest);

    auto gw = make_gateway(paths);
    std::vector<quality::QualityRecord> records;
    json failures = json::array();
    for (const auto& item : benchmark.items) {
        try {
            records.push_back(quality::judge_item(gw, judge, item));
        } catch (const AuthFailure&) {
            throw;  // credential problems poison every remaining call
        } catch (const Error& e) {
            failures.push_back({{"item_id", item.item_id}, {"error", e.what()}});
        }
    }
    quality::save_records(records, paths.quality().string());

    if (!config.embedder_name.empty() && benchmark.items.size() >= 2) {
        const auto embedder = *config.find_endpoint(config.embedder_name);
        auto diversity = quality::benchmark_diversity(gw, embedder, benchmark);
        write_json_file(paths.diversity(), diversity.to_json());
    }
    record_usage(config, paths, gw, "qc");

    manifest["counts"]["quality_records"] = records.size();
    manifest["counts"]["quality_failures"] = failures.size();
    const int code = failures.empty() ? kOk : kPartial;
    mark_stage(manifest, "qc", code);
    if (!failures.empty()) manifest["stages"]["qc"]["failures"] = failures;
    write_json_file(paths.manifest(), manifest);
    return code;
}

int cmd_eval(const RunConfig& config, const RunPaths& paths) {
    paths.ensure_exists();
    auto benchmark = load_run_benchmark(paths, "eval");
    auto models = config.resolve(config.evaluated_model_names);
    if (models.empty()) {
        throw ConfigError("evaluated_models", "eval needs at least one evaluated model");
    }
    const gateway::ModelEndpoint* judge = nullptr;
    gateway::ModelEndpoint judge_storage;
    if (!config.judge_name.empty()) {
        judge_storage = *config.find_endpoint(config.judge_name);
        judge = &judge_storage;
    } else if (benchmark.mode == genesis::ItemMode::open_ended) {
        throw ConfigError("judge", "open-ended grading needs a judge endpoint");
    }

    json manifest = load_manifest(paths);
    prime_manifest(manifest, config, paths);
    write_json_file(paths.manifest(), manifest);

    auto gw = make_gateway(paths);
    auto result = harness::run_eval(gw, benchmark, models,
                                    static_cast<std::uint64_t>(config.seed), judge);

    harness::save_transcripts(result.transcripts, paths.transcripts().string());
    write_text_file(paths.matrix_csv(), result.matrix.to_csv());
    write_json_file(paths.matrix_json(), result.matrix.to_json());
    record_usage(config, paths, gw, "eval");

    manifest["counts"]["transcripts"] = result.transcripts.size();
    manifest["incomplete_models"] = result.incomplete_models;
    const int code = result.incomplete_models.empty() ? kOk : kPartial;
    mark_stage(manifest, "eval", code);
    write_json_file(paths.manifest(), manifest);
    return code;
}

int cmd_analyze(const RunConfig& config, const RunPaths& paths,
                const std::string& reference_path) {
    paths.ensure_exists();
    require_artifact("analyze", paths.matrix_json(), "run the eval stage first");
    const std::string ref = reference_path.empty() ? config.reference_matrix : reference_path;
    if (ref.empty()) {
        throw ConfigError("reference",
                          "analyze needs --reference or reference_matrix in the config");
    }
    require_artifact("analyze", ref, "reference accuracy matrix not found");

    auto synth = harness::AccuracyMatrix::from_json(read_json_file(paths.matrix_json()));
    auto reference = harness::AccuracyMatrix::from_json(read_json_file(ref));

    auto report = analysis::agreement(synth, reference);
    write_json_file(paths.agreement(), report.to_json());

    {
        std::string csv = "model,mean_accuracy\n";
        for (const auto& [model, mean] : analysis::rank_models(synth)) {
            csv += model + "," + csv_number(mean) + "\n";
        }
        write_text_file(paths.ranks_csv(), csv);
    }
    {
        std::string csv = "model,dataset,synthetic_accuracy,reference_accuracy\n";
        for (const auto& point : report.pairing) {
            csv += point.model + "," + point.dataset + "," + csv_number(point.synth_acc) + ","
                   + csv_number(point.reference_acc) + "\n";
        }
        write_text_file(paths.scatter_csv(), csv);
    }

    json manifest = load_manifest(paths);
    prime_manifest(manifest, config, paths);
    manifest["counts"]["agreement_points"] = report.n_points;

    // Question-length trend, only when the quality stage left us token counts.
    if (std::filesystem::exists(paths.quality()) && std::filesystem::exists(paths.benchmark())) {
        auto benchmark = load_run_benchmark(paths, "analyze");
        auto records = quality::load_records(paths.quality().string());
        try {
            auto trend = analysis::length_effect({benchmark}, records, synth, reference);
            write_json_file(paths.length_effect(), trend.to_json());
        } catch (const MissingRecord& e) {
            // qc covered only part of the benchmark; the trend would be biased
            manifest["stages"]["analyze"]["length_effect_skipped"] = e.what();
        }
    }

    mark_stage(manifest, "analyze", kOk);
    write_json_file(paths.manifest(), manifest);
    return kOk;
}

int cmd_report(const RunConfig& config, const RunPaths& paths) {
    require_artifact("report", paths.benchmark(), "run the pipeline stages first");
    auto benchmark = load_run_benchmark(paths, "report");
    json manifest = load_manifest(paths);

    json report = json::object();

    {
        std::map<std::string, int> per_generator;
        for (const auto& item : benchmark.items) per_generator[item.generating_model]++;
        json bench_section{{"benchmark_id", benchmark.benchmark_id},
                           {"dataset", benchmark.dataset},
                           {"mode", genesis::to_string(benchmark.mode)},
                           {"n_items", benchmark.items.size()},
                           {"items_per_generator", per_generator},
                           {"source_docs", benchmark.source_doc_ids}};
        if (std::filesystem::exists(paths.dropped())) {
            std::ifstream in(paths.dropped());
            int n = 0;
            for (std::string line; std::getline(in, line);) {
                if (!line.empty()) ++n;
            }
            bench_section["n_dropped"] = n;
        }
        if (manifest.contains("denied_sections")) {
            bench_section["denied_sections"] = manifest["denied_sections"];
        }
        if (manifest.contains("partial")) bench_section["partial"] = manifest["partial"];
        report["benchmark"] = std::move(bench_section);
    }

    if (std::filesystem::exists(paths.quality())) {
        auto records = quality::load_records(paths.quality().string());
        double clarity = 0, grounded = 0, correct = 0, validity = 0, tokens = 0;
        for (const auto& r : records) {
            clarity += r.clarity;
            grounded += r.groundedness;
            correct += r.answer_correctness;
            validity += r.explanation_validity;
            tokens += r.question_token_count;
        }
        const double n = records.empty() ? 1.0 : static_cast<double>(records.size());
        json quality_section{{"n_records", records.size()},
                             {"mean_clarity", clarity / n},
                             {"mean_groundedness", grounded / n},
                             {"mean_answer_correctness", correct / n},
                             {"mean_explanation_validity", validity / n},
                             {"mean_question_tokens", tokens / n},
                             {"thresholds",
                              {{"answer_correctness", config.thresholds.min_answer_correctness},
                               {"explanation_validity", config.thresholds.min_explanation_validity}}}};
        try {
            auto outcome = quality::filter_by_quality(benchmark, records, config.thresholds);
            quality_section["below_threshold"] = outcome.dropped.size();
        } catch (const MissingRecord&) {
            // partial qc run: per-item filtering is undefined, means still stand
        }
        report["quality"] = std::move(quality_section);
    }

    if (std::filesystem::exists(paths.diversity())) {
        report["diversity"] = read_json_file(paths.diversity());
    }
    if (std::filesystem::exists(paths.matrix_json())) {
        report["matrix"] = read_json_file(paths.matrix_json());
        if (manifest.contains("incomplete_models")) {
            report["incomplete_models"] = manifest["incomplete_models"];
        }
    }
    if (std::filesystem::exists(paths.agreement())) {
        report["agreement"] = read_json_file(paths.agreement());
    }
    if (std::filesystem::exists(paths.length_effect())) {
        report["length_effect"] = read_json_file(paths.length_effect());
    }
    if (std::filesystem::exists(paths.usage())) {
        report["usage"] = read_json_file(paths.usage());
    }

    write_json_file(paths.report(), report);

    prime_manifest(manifest, config, paths);
    mark_stage(manifest, "report", kOk);
    write_json_file(paths.manifest(), manifest);
    return kOk;
}

int cmd_usage(const RunConfig& config, const RunPaths& paths, std::ostream& out) {
    (void)config;
    require_artifact("usage", paths.usage(), "no stage has recorded model traffic yet");
    const json usage = read_json_file(paths.usage());

    struct Tally {
        long long prompt = 0, completion = 0, requests = 0, errors = 0;
        double cost = 0;
        bool priced = false;
    };
    std::map<std::string, Tally> combined;
    for (const auto& [stage, section] : usage.items()) {
        if (!section.is_object() || !section.contains("endpoints")) continue;
        for (const auto& row : section["endpoints"]) {
            auto& t = combined[row.value("endpoint", std::string("?"))];
            t.prompt += row.value("prompt_tokens", 0LL);
            t.completion += row.value("completion_tokens", 0LL);
            t.requests += row.value("request_count", 0LL);
            t.errors += row.value("error_count", 0LL);
            if (row.contains("cost_usd")) {
                t.cost += row["cost_usd"].get<double>();
                t.priced = true;
            }
        }
    }

    out << std::left << std::setw(24) << "endpoint" << std::right << std::setw(14)
        << "prompt_toks" << std::setw(14) << "compl_toks" << std::setw(10) << "requests"
        << std::setw(8) << "errors" << std::setw(12) << "cost_usd" << "\n";
    Tally total;
    bool any_priced = false;
    for (const auto& [name, t] : combined) {
        out << std::left << std::setw(24) << name << std::right << std::setw(14) << t.prompt
            << std::setw(14) << t.completion << std::setw(10) << t.requests << std::setw(8)
            << t.errors;
        if (t.priced) {
            out << std::setw(12) << std::fixed << std::setprecision(4) << t.cost;
            any_priced = true;
        } else {
            out << std::setw(12) << "-";
        }
        out << "\n";
        total.prompt += t.prompt;
        total.completion += t.completion;
        total.requests += t.requests;
        total.errors += t.errors;
        total.cost += t.cost;
    }
    out << std::left << std::setw(24) << "total" << std::right << std::setw(14) << total.prompt
        << std::setw(14) << total.completion << std::setw(10) << total.requests << std::setw(8)
        << total.errors;
    if (any_priced) {
        out << std::setw(12) << std::fixed << std::setprecision(4) << total.cost;
    } else {
        out << std::setw(12) << "-";
    }
    out << "\n";
    return kOk;
}

}  // namespace groundbench::run
