#pragma once

// Run configuration, run-directory layout, pipeline stage commands, and
// report assembly.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groundbench/corpus.hpp"
#include "groundbench/gateway.hpp"
#include "groundbench/genesis.hpp"
#include "groundbench/quality.hpp"

namespace groundbench::run {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by every stage command.
inline constexpr int kOk = 0;       // stage completed cleanly
inline constexpr int kPartial = 1;  // completed with dropped items / skipped models
inline constexpr int kFailed = 2;   // stage could not produce its artifacts

struct RunConfig {
    long long seed = 0;
    genesis::ItemMode mode = genesis::ItemMode::mcq;
    std::string dataset;  // join key against reference matrices
    std::vector<std::string> docs;
    std::vector<gateway::ModelEndpoint> endpoints;
    std::vector<std::string> generator_names;
    std::string judge_name;     // empty = qc and open-ended grading unavailable
    std::string embedder_name;  // empty = diversity skipped
    std::vector<std::string> evaluated_model_names;
    corpus::ChunkPolicy chunk_policy;
    int max_topics = 10;
    double drop_ceiling = 0.10;
    quality::QualityThresholds thresholds;
    std::string prompt_template_version = "v1";
    std::string reference_matrix;  // default --reference for analyze
    std::map<std::string, gateway::PriceEntry> prices;

    const gateway::ModelEndpoint* find_endpoint(const std::string& name) const;
    std::vector<gateway::ModelEndpoint> resolve(const std::vector<std::string>& names) const;
    nlohmann::json to_json() const;  // manifest snapshot; never contains secrets
};

// Parses and cross-checks a config file; all field errors are aggregated into
// one ConfigError.  Relative paths resolve against the config file's
// directory.
RunConfig validate_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& config_json, const std::string& base_dir);

struct RunPaths {
    std::filesystem::path dir;

    explicit RunPaths(std::filesystem::path run_dir) : dir(std::move(run_dir)) {}
    void ensure_exists() const { std::filesystem::create_directories(dir); }

    std::filesystem::path benchmark() const { return dir / "benchmark.jsonl"; }
    std::filesystem::path dropped() const { return dir / "dropped.jsonl"; }
    std::filesystem::path quality() const { return dir / "quality.jsonl"; }
    std::filesystem::path diversity() const { return dir / "diversity.json"; }
    std::filesystem::path transcripts() const { return dir / "transcripts.jsonl"; }
    std::filesystem::path matrix_csv() const { return dir / "matrix.csv"; }
    std::filesystem::path matrix_json() const { return dir / "matrix.json"; }
    std::filesystem::path agreement() const { return dir / "agreement.json"; }
    std::filesystem::path length_effect() const { return dir / "length_effect.json"; }
    std::filesystem::path ranks_csv() const { return dir / "ranks.csv"; }
    std::filesystem::path scatter_csv() const { return dir / "scatter.csv"; }
    std::filesystem::path report() const { return dir / "report.json"; }
    std::filesystem::path manifest() const { return dir / "manifest.json"; }
    std::filesystem::path cache() const { return dir / "cache.jsonl"; }
    std::filesystem::path usage() const { return dir / "usage.json"; }
};

// Stage commands.  Each returns kOk/kPartial and throws on hard failure
// (callers map exceptions to kFailed).  The manifest is written before any
// model traffic.
int cmd_generate(const RunConfig& config, const RunPaths& paths);
int cmd_qc(const RunConfig& config, const RunPaths& paths);
int cmd_eval(const RunConfig& config, const RunPaths& paths);
int cmd_analyze(const RunConfig& config, const RunPaths& paths,
                const std::string& reference_path);
int cmd_report(const RunConfig& config, const RunPaths& paths);
int cmd_usage(const RunConfig& config, const RunPaths& paths, std::ostream& out);

}  // namespace groundbench::run
