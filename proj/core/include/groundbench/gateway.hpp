#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace groundbench::gateway {

enum class ResponseFormat { free_text, json_object };

struct ModelEndpoint {
    std::string name;         // unique within a run configuration
    std::string base_url;     // "https://host/v1" or "mock:<behavior>?<params>"
    std::string api_key_ref;  // env var holding the bearer token, may be empty
    std::string model;        // wire model id; defaults to name
    bool supports_temperature = true;
    int max_concurrency = 4;
    double request_timeout_s = 120.0;

    const std::string& wire_model() const { return model.empty() ? name : model; }
    bool is_mock() const { return base_url.rfind("mock:", 0) == 0; }
};

struct ChatRequest {
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.7;
    int max_tokens = 2048;
    ResponseFormat response_format = ResponseFormat::free_text;
};

struct ChatResponse {
    std::string text;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    bool cached = false;
    std::string endpoint_name;
};

struct EndpointUsage {
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    long long request_count = 0;  // completed successful requests
    long long error_count = 0;    // failed attempts, including retried ones
};

class UsageLedger {
public:
    void record_success(const std::string& endpoint, long long prompt_toks, long long completion_toks);
    void record_error(const std::string& endpoint);
    std::map<std::string, EndpointUsage> snapshot() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, EndpointUsage> usage_;
};

struct PriceEntry {
    double prompt_per_million = 0.0;
    double completion_per_million = 0.0;
};

struct UsageRow {
    std::string endpoint;
    EndpointUsage usage;
    std::optional<double> cost_usd;  // present when the price table names the endpoint
};

struct UsageSummary {
    std::vector<UsageRow> rows;
    long long total_prompt_tokens = 0;
    long long total_completion_tokens = 0;
    std::optional<double> total_cost_usd;
    nlohmann::json to_json() const;
};

UsageSummary usage_report(const UsageLedger& ledger,
                          const std::map<std::string, PriceEntry>& price_table = {});

struct WireReply {
    int status = 0;
    std::string body;
    bool timed_out = false;
    std::string detail;  // transport-level failure description
};

/// Route is "chat" or "embeddings"; body is the OpenAI-style JSON payload.
/// call_tag is forwarded so scripted transports can dispatch without
/// depending on prompt wording.
class Transport {
public:
    virtual ~Transport() = default;
    virtual WireReply post(const ModelEndpoint& endpoint, const std::string& route,
                           const std::string& body, const std::string& call_tag) = 0;
};

/// Built-in transport for "mock:" endpoints; see mock_models.cpp for the
/// behavior vocabulary.
std::shared_ptr<Transport> make_mock_transport();

std::string request_digest(const ChatRequest& request);
std::string embed_digest(const std::vector<std::string>& texts);

/// Uniform chat/embedding access with deterministic caching, bounded
/// per-endpoint concurrency, retries with exponential backoff, and a usage
/// ledger.
class Gateway {
public:
    struct Options {
        std::filesystem::path cache_path;       // empty: in-memory cache only
        std::shared_ptr<Transport> transport;   // override for tests; null: http + mock dispatch
        int max_attempts = 5;
        double base_backoff_s = 0.5;
    };

    Gateway();
    explicit Gateway(Options options);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Cache hit returns the stored response with cached=true and touches
    /// neither the network nor the ledger.
    ChatResponse chat(const ModelEndpoint& endpoint, const ChatRequest& request,
                      const std::string& call_tag);

    /// One vector per text, order preserving, all of equal dimension.
    std::vector<std::vector<double>> embed(const ModelEndpoint& endpoint,
                                           const std::vector<std::string>& texts,
                                           const std::string& call_tag = "embed");

    UsageLedger& ledger();
    const UsageLedger& ledger() const;

    /// Process-wide count of real HTTP requests; mock endpoints never touch it.
    static long long http_requests_total();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace groundbench::gateway
