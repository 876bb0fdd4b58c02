#pragma once

// Item generation: chunk -> topics, (chunk, topic) -> benchmark item, and
// human (context, question, answer) tuples -> self-contained reformatted
// items.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groundbench/corpus.hpp"
#include "groundbench/gateway.hpp"

namespace groundbench::genesis {

enum class ItemMode { mcq, open_ended };

std::string to_string(ItemMode mode);
ItemMode mode_from_string(const std::string& name);  // throws Error on anything else

struct Topic {
    std::string chunk_id;
    std::string text;  // short noun phrase, <= 200 chars
    int ordinal = 0;   // position within the chunk's deduplicated list
};

struct BenchmarkItem {
    std::string item_id;
    ItemMode mode = ItemMode::mcq;
    std::string chunk_id;  // source chunk, or the human item id when reformatted
    std::string topic;
    std::string context;   // grounding text; never shown at evaluation time
    std::string question;
    std::map<std::string, std::string> choices;  // exactly A..D for mcq, empty otherwise
    std::string answer_letter;                   // "A".."D" for mcq, empty otherwise
    std::string answer_text;                     // == choices[answer_letter] for mcq
    std::string justification;                   // generation-time guard, not administered
    std::string generating_model;

    nlohmann::json to_json() const;
    // Throws SchemaViolation with a reason; never accepts an invalid record.
    static BenchmarkItem from_json(const nlohmann::json& record);
};

struct Benchmark {
    std::string benchmark_id;
    ItemMode mode = ItemMode::mcq;
    std::string dataset;  // join key against reference benchmarks
    std::vector<BenchmarkItem> items;
    std::vector<std::string> source_doc_ids;
    std::vector<std::string> generating_models;
};

// Content invariants only (question/choices/answer/justification) — what a
// raw model reply can be held to before provenance is attached.
std::vector<std::string> validate_content(const BenchmarkItem& item);

// Content plus provenance (item_id, chunk_id, context, generating_model).
// Empty list = the item satisfies every invariant; otherwise one reason per
// violation.
std::vector<std::string> validate_item(const BenchmarkItem& item);

// Parses one raw model reply (fenced ```json block or bare object) into the
// content fields of an item.  Total over arbitrary input: anything invalid
// throws SchemaViolation carrying the reason.  Provenance fields are left for
// the caller.
BenchmarkItem parse_generated_item(const std::string& reply_text, ItemMode mode);

// Prompt construction, versioned so manifests can record what was used.
// Test code asserts structural properties only (never wording).
struct PromptTemplates {
    static const char* version();  // "v1"

    static std::string topics_system();
    static std::string topics_user(const corpus::ContextChunk& chunk, int max_topics);
    static std::string item_system(ItemMode mode);
    static std::string item_user(const corpus::ContextChunk& chunk, const Topic& topic,
                                 ItemMode mode);
    static std::string reformat_system(ItemMode target);
    // Ends with the source tuple as a single-line JSON payload.
    static std::string reformat_user(const corpus::HumanItem& human, ItemMode target);
    // Re-prompt after a rejected reply; carries the validator's reason.
    static std::string repair_suffix(const std::string& reason, int attempt);
};

// One chat call (plus up to two format-repair retries); duplicates within the
// chunk are removed case-insensitively.  Throws UnparseableTopicList or
// EmptyTopicList.
std::vector<Topic> extract_topics(gateway::Gateway& gateway,
                                  const gateway::ModelEndpoint& generator,
                                  const corpus::ContextChunk& chunk, int max_topics = 10);

// One item per (chunk, topic); up to two repair retries, then SchemaViolation.
BenchmarkItem generate_mcq(gateway::Gateway& gateway, const gateway::ModelEndpoint& generator,
                           const corpus::ContextChunk& chunk, const Topic& topic);
BenchmarkItem generate_open_ended(gateway::Gateway& gateway,
                                  const gateway::ModelEndpoint& generator,
                                  const corpus::ContextChunk& chunk, const Topic& topic);

enum class ReformatMode { mcq, open_ended, passthrough };

// Rewrites a human item to be answerable without its context.  passthrough
// copies fields without an LM call (for already self-contained datasets).
// Throws CorrectAnswerLost when the gold answer did not survive (yes/no/maybe
// answers compare leniently: the reformatter may expand them into sentences).
BenchmarkItem reformat_human_item(gateway::Gateway& gateway,
                                  const gateway::ModelEndpoint& reformatter,
                                  const corpus::HumanItem& human, ReformatMode mode);

struct BuildOptions {
    ItemMode mode = ItemMode::mcq;
    int max_topics = 10;
    double drop_ceiling = 0.10;  // dropped/(dropped+kept) above this marks the build partial
    std::string dataset;         // defaults to the doc ids joined with '+'
    std::string benchmark_id;    // defaults to "<dataset>-<mode>-<hash>"
};

struct DropLogEntry {
    std::string chunk_id;
    std::string topic;  // empty for chunk-level failures (topic extraction)
    std::string generating_model;
    std::string reason;
};

struct BuildReport {
    Benchmark benchmark;
    std::vector<DropLogEntry> dropped;        // generation failures, counted by the ceiling
    std::vector<std::string> denied_sections; // deny-listed chunk ids, excluded by policy
    bool partial = false;
};

// Chunks every document, extracts topics and generates one item per
// (chunk, topic) for each generator independently; the concatenation over
// generators is the ensemble benchmark.  Output order is canonical:
// (doc input order, chunk ordinal, topic ordinal, generator name).
BuildReport build_benchmark(gateway::Gateway& gateway,
                            const std::vector<corpus::DocumentTree>& docs,
                            const corpus::ChunkPolicy& policy,
                            const std::vector<gateway::ModelEndpoint>& generators,
                            const BuildOptions& options);

// JSON-lines persistence, one item per line, in benchmark order.
void save_benchmark(const Benchmark& benchmark, const std::string& path);
Benchmark load_benchmark(const std::string& path);

}  // namespace groundbench::genesis
