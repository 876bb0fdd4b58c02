#pragma once

// Benchmark administration: prompt construction, seeded option shuffling,
// answer extraction, open-ended judging, and accuracy aggregation.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groundbench/gateway.hpp"
#include "groundbench/genesis.hpp"

namespace groundbench::harness {

enum class Verdict { correct, incorrect, unextractable };
std::string to_string(Verdict verdict);
Verdict verdict_from_string(const std::string& name);

struct Transcript {
    std::string item_id;
    std::string evaluated_model;
    std::string benchmark_id;
    // Original option letters in the order presented (mcq only):
    // presented slot i showed choices[presented_order[i]].
    std::array<char, 4> presented_order{{'A', 'B', 'C', 'D'}};
    bool shuffled = false;  // false for open-ended transcripts
    std::string raw_response;
    std::string extracted;  // presented letter (mcq) or the graded text (open-ended)
    Verdict verdict = Verdict::unextractable;
    int extraction_tier = 0;  // 1 pattern, 2 containment, 3 judge; 0 when not extracted
    std::string rationale;    // judge's one-liner for open-ended grading
    std::string failure;      // transport failure detail when a call never succeeded

    nlohmann::json to_json() const;
    static Transcript from_json(const nlohmann::json& record);
};

struct AccuracyCell {
    int n_items = 0;
    int correct = 0;
    int unextractable = 0;
    double accuracy = 0.0;  // == correct / n_items exactly
};

struct AccuracyMatrix {
    // evaluated model -> dataset -> cell
    std::map<std::string, std::map<std::string, AccuracyCell>> cells;

    nlohmann::json to_json() const;
    static AccuracyMatrix from_json(const nlohmann::json& record);
    // rows = models, cols = union of datasets (sorted); empty cell = blank
    std::string to_csv() const;
};

// Deterministic permutation from (seed, item_id), identical on every
// platform: perm[slot] = index of the original option presented there.
std::array<int, 4> draw_permutation(std::uint64_t seed, const std::string& item_id);

// The evaluation prompt shows the question and shuffled options only — never
// the context.  Options render one per line as "<LETTER>. <text>".
std::string mcq_prompt(const genesis::BenchmarkItem& item, const std::array<int, 4>& perm);
std::string open_ended_prompt(const genesis::BenchmarkItem& item);
// Judge prompts end with a single-line JSON payload carrying the material.
std::string extract_prompt(const std::string& raw_response,
                           const std::map<std::string, std::string>& presented_options);
std::string grade_prompt(const genesis::BenchmarkItem& item, const std::string& raw_response);

struct Extraction {
    std::optional<char> letter;  // presented letter
    int tier = 0;
};

// Tiered extraction over the PRESENTED options: (1) unambiguous standalone
// letter / "answer is X" pattern; (2) unique option-text containment;
// (3) judge extraction when one is supplied.  Total — never throws.
Extraction extract_choice(const std::string& raw_response,
                          const std::map<std::string, std::string>& presented_options,
                          gateway::Gateway* gateway, const gateway::ModelEndpoint* judge,
                          const std::string& call_tag);

Transcript administer_mcq(gateway::Gateway& gateway, const genesis::BenchmarkItem& item,
                          const gateway::ModelEndpoint& model, std::uint64_t seed,
                          const gateway::ModelEndpoint* judge = nullptr);
// Same, with the permutation chosen by the caller (tests enumerate all 24).
Transcript administer_mcq_with_permutation(gateway::Gateway& gateway,
                                           const genesis::BenchmarkItem& item,
                                           const gateway::ModelEndpoint& model,
                                           const std::array<int, 4>& perm,
                                           const gateway::ModelEndpoint* judge = nullptr);

// Grades an existing response; empty responses are incorrect without a judge
// call.  UnparseableVerdict after 2 retries surfaces as unextractable.
std::pair<Verdict, std::string> grade_open_ended(gateway::Gateway& gateway,
                                                 const genesis::BenchmarkItem& item,
                                                 const std::string& raw_response,
                                                 const gateway::ModelEndpoint& judge);

Transcript administer_open_ended(gateway::Gateway& gateway, const genesis::BenchmarkItem& item,
                                 const gateway::ModelEndpoint& model,
                                 const gateway::ModelEndpoint& judge);

struct EvalResult {
    AccuracyMatrix matrix;
    std::vector<Transcript> transcripts;
    // models with >50% transport failures: excluded from the matrix, reported
    std::vector<std::string> incomplete_models;
};

// Every (model, item) pair yields exactly one transcript; cells are exact
// correct/n ratios keyed by the benchmark's dataset.
EvalResult run_eval(gateway::Gateway& gateway, const genesis::Benchmark& benchmark,
                    const std::vector<gateway::ModelEndpoint>& models, std::uint64_t seed,
                    const gateway::ModelEndpoint* judge = nullptr);

void save_transcripts(const std::vector<Transcript>& transcripts, const std::string& path);
std::vector<Transcript> load_transcripts(const std::string& path);

}  // namespace groundbench::harness
