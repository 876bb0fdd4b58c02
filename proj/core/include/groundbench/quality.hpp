#pragma once

// Item quality scoring by an LM judge, local token counting, benchmark
// diversity via embeddings, and threshold filtering.

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groundbench/gateway.hpp"
#include "groundbench/genesis.hpp"

namespace groundbench::quality {

struct QualityRecord {
    std::string item_id;
    int question_token_count = 0;
    double clarity = 0;               // [1,10], judged without the context
    double groundedness = 0;          // [1,10]
    double answer_correctness = 0;    // [1,10]
    double explanation_validity = 0;  // [1,10]
    std::string judge_model;

    nlohmann::json to_json() const;
    static QualityRecord from_json(const nlohmann::json& record);
};

struct DiversityReport {
    std::string benchmark_id;
    double mean_pairwise_cosine = 0;  // lower = more diverse
    int n_items = 0;
    std::string embedder;

    nlohmann::json to_json() const;
};

struct QualityThresholds {
    double min_answer_correctness = 8.0;
    double min_explanation_validity = 8.0;
};

// Default rule: split on whitespace, then split a leading and a trailing
// punctuation run off each piece as their own tokens ("What year?" -> 3).
using TokenRule = std::function<int(const std::string&)>;
int count_question_tokens(const std::string& question);
int count_question_tokens(const std::string& question, const TokenRule& rule);

// Prompt builders are exposed so tests can assert the clarity prompt never
// contains the context while the grounded prompt does.
std::string clarity_system();
std::string clarity_user(const genesis::BenchmarkItem& item);
std::string grounded_system();
std::string grounded_user(const genesis::BenchmarkItem& item);

// Two judge calls per item: clarity in isolation, then groundedness /
// answer_correctness / explanation_validity with the full context.  Up to two
// format-repair retries per call, then UnparseableScores.  Scores outside
// [1,10] throw OutOfRangeScore — never clamped.
QualityRecord judge_item(gateway::Gateway& gateway, const gateway::ModelEndpoint& judge,
                         const genesis::BenchmarkItem& item);
QualityRecord judge_item(gateway::Gateway& gateway, const gateway::ModelEndpoint& judge,
                         const genesis::BenchmarkItem& item, const TokenRule& rule);

// Mean cosine over all unordered distinct pairs; vectors are normalized
// in-house.  Throws Error on n<2 or a zero vector, DimensionMismatch on
// ragged input.
double mean_pairwise_cosine(const std::vector<std::vector<double>>& vectors);

DiversityReport benchmark_diversity(gateway::Gateway& gateway,
                                    const gateway::ModelEndpoint& embedder,
                                    const genesis::Benchmark& benchmark);

struct QualityDrop {
    std::string item_id;
    std::string feature;  // the threshold that failed
    double score = 0;
};

struct FilterOutcome {
    genesis::Benchmark kept;
    std::vector<QualityDrop> dropped;
};

// Keeps items meeting both thresholds.  Throws MissingRecord when an item has
// no record.
FilterOutcome filter_by_quality(const genesis::Benchmark& benchmark,
                                const std::vector<QualityRecord>& records,
                                const QualityThresholds& thresholds);

void save_records(const std::vector<QualityRecord>& records, const std::string& path);
std::vector<QualityRecord> load_records(const std::string& path);

}  // namespace groundbench::quality
