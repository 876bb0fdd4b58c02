#include "groundbench/gateway.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>
#include <unordered_map>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "groundbench/digest.hpp"
#include "groundbench/errors.hpp"

namespace groundbench::gateway {

using nlohmann::json;

namespace {

std::atomic<long long> g_http_requests{0};

class HttpTransport : public Transport {
public:
    WireReply post(const ModelEndpoint& endpoint, const std::string& route,
                   const std::string& body, const std::string& /*call_tag*/) override {
        g_http_requests.fetch_add(1, std::memory_order_relaxed);

        std::string scheme_host, path_prefix;
        split_base_url(endpoint.base_url, &scheme_host, &path_prefix);

        httplib::Client client(scheme_host);
        auto timeout = std::chrono::milliseconds(
            static_cast<long long>(endpoint.request_timeout_s * 1000.0));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);

        httplib::Headers headers;
        if (!endpoint.api_key_ref.empty()) {
            const char* key = std::getenv(endpoint.api_key_ref.c_str());
            if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        std::string path = path_prefix + (route == "chat" ? "/chat/completions" : "/embeddings");
        auto result = client.Post(path, headers, body, "application/json");

        WireReply reply;
        if (!result) {
            auto err = result.error();
            reply.timed_out = (err == httplib::Error::ConnectionTimeout ||
                               err == httplib::Error::Read || err == httplib::Error::Write);
            reply.detail = httplib::to_string(err);
            return reply;
        }
        reply.status = result->status;
        reply.body = result->body;
        return reply;
    }

private:
    static void split_base_url(const std::string& base_url, std::string* scheme_host,
                               std::string* path_prefix) {
        std::size_t scheme_end = base_url.find("://");
        std::size_t path_start = (scheme_end == std::string::npos)
                                     ? base_url.find('/')
                                     : base_url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            *scheme_host = base_url;
            path_prefix->clear();
        } else {
            *scheme_host = base_url.substr(0, path_start);
            *path_prefix = base_url.substr(path_start);
            while (!path_prefix->empty() && path_prefix->back() == '/') path_prefix->pop_back();
        }
    }
};

// Routes mock: endpoints to the built-in scripted transport and everything
// else to HTTP.
class DispatchTransport : public Transport {
public:
    WireReply post(const ModelEndpoint& endpoint, const std::string& route,
                   const std::string& body, const std::string& call_tag) override {
        if (endpoint.is_mock()) {
            if (!mock_) mock_ = make_mock_transport();
            return mock_->post(endpoint, route, body, call_tag);
        }
        return http_.post(endpoint, route, body, call_tag);
    }

private:
    HttpTransport http_;
    std::shared_ptr<Transport> mock_;
};

// Counting semaphore with runtime capacity.
class EndpointSlots {
public:
    explicit EndpointSlots(int capacity) : available_(capacity) {}

    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return available_ > 0; });
        --available_;
    }
    void release() {
        {
            std::lock_guard lock(mu_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int available_;
};

struct SlotGuard {
    EndpointSlots* slots;
    explicit SlotGuard(EndpointSlots* s) : slots(s) { slots->acquire(); }
    ~SlotGuard() { slots->release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;
};

std::string format_name(ResponseFormat f) {
    return f == ResponseFormat::json_object ? "json_object" : "free_text";
}

}  // namespace

void UsageLedger::record_success(const std::string& endpoint, long long prompt_toks,
                                 long long completion_toks) {
    std::lock_guard lock(mu_);
    EndpointUsage& u = usage_[endpoint];
    u.prompt_tokens += prompt_toks;
    u.completion_tokens += completion_toks;
    u.request_count += 1;
}

void UsageLedger::record_error(const std::string& endpoint) {
    std::lock_guard lock(mu_);
    usage_[endpoint].error_count += 1;
}

std::map<std::string, EndpointUsage> UsageLedger::snapshot() const {
    std::lock_guard lock(mu_);
    return usage_;
}

json UsageSummary::to_json() const {
    json rows_json = json::array();
    for (const auto& row : rows) {
        json r{{"endpoint", row.endpoint},
               {"prompt_tokens", row.usage.prompt_tokens},
               {"completion_tokens", row.usage.completion_tokens},
               {"request_count", row.usage.request_count},
               {"error_count", row.usage.error_count}};
        if (row.cost_usd) r["cost_usd"] = *row.cost_usd;
        rows_json.push_back(std::move(r));
    }
    json out{{"endpoints", rows_json},
             {"total_prompt_tokens", total_prompt_tokens},
             {"total_completion_tokens", total_completion_tokens}};
    if (total_cost_usd) out["total_cost_usd"] = *total_cost_usd;
    return out;
}

UsageSummary usage_report(const UsageLedger& ledger,
                          const std::map<std::string, PriceEntry>& price_table) {
    UsageSummary summary;
    double cost_total = 0.0;
    bool any_priced = false;
    for (const auto& [name, usage] : ledger.snapshot()) {
        UsageRow row{name, usage, std::nullopt};
        auto it = price_table.find(name);
        if (it != price_table.end()) {
            double cost = usage.prompt_tokens / 1e6 * it->second.prompt_per_million +
                          usage.completion_tokens / 1e6 * it->second.completion_per_million;
            row.cost_usd = cost;
            cost_total += cost;
            any_priced = true;
        }
        summary.total_prompt_tokens += usage.prompt_tokens;
        summary.total_completion_tokens += usage.completion_tokens;
        summary.rows.push_back(std::move(row));
    }
    if (any_priced) summary.total_cost_usd = cost_total;
    return summary;
}

std::string request_digest(const ChatRequest& request) {
    json canonical{{"system_prompt", request.system_prompt},
                   {"user_prompt", request.user_prompt},
                   {"temperature", request.temperature},
                   {"max_tokens", request.max_tokens},
                   {"response_format", format_name(request.response_format)}};
    return sha256_hex(canonical.dump());
}

std::string embed_digest(const std::vector<std::string>& texts) {
    json canonical = json::array();
    for (const auto& t : texts) canonical.push_back(t);
    return sha256_hex(canonical.dump());
}

struct Gateway::Impl {
    Options options;
    UsageLedger ledger;

    std::mutex cache_mu;
    std::unordered_map<std::string, json> cache;  // key -> stored response object
    std::ofstream cache_out;

    std::mutex slots_mu;
    std::unordered_map<std::string, std::unique_ptr<EndpointSlots>> slots;

    explicit Impl(Options opts) : options(std::move(opts)) {
        if (!options.transport) options.transport = std::make_shared<DispatchTransport>();
        if (!options.cache_path.empty()) {
            load_cache();
            cache_out.open(options.cache_path, std::ios::app);
        }
    }

    void load_cache() {
        std::ifstream in(options.cache_path);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                json rec = json::parse(line);
                cache[rec.at("key").get<std::string>()] = rec.at("response");
            } catch (const json::exception&) {
                // a torn trailing line from an interrupted run is not fatal
            }
        }
    }

    std::optional<json> cache_get(const std::string& key) {
        std::lock_guard lock(cache_mu);
        auto it = cache.find(key);
        if (it == cache.end()) return std::nullopt;
        return it->second;
    }

    void cache_put(const std::string& key, const json& request, const json& response) {
        std::lock_guard lock(cache_mu);
        cache[key] = response;
        if (cache_out.is_open()) {
            json rec{{"key", key},
                     {"request", request},
                     {"response", response},
                     {"timestamp", std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::system_clock::now().time_since_epoch())
                                       .count()}};
            cache_out << rec.dump() << "\n";
            cache_out.flush();
        }
    }

    EndpointSlots& slots_for(const ModelEndpoint& endpoint) {
        std::lock_guard lock(slots_mu);
        auto it = slots.find(endpoint.name);
        if (it == slots.end()) {
            int cap = endpoint.max_concurrency > 0 ? endpoint.max_concurrency : 1;
            it = slots.emplace(endpoint.name, std::make_unique<EndpointSlots>(cap)).first;
        }
        return *it->second;
    }

    void backoff_sleep(int attempt, const std::string& salt) {
        if (options.base_backoff_s <= 0.0) return;
        // jitter does not affect any recorded output, so it need not draw
        // from the run seed
        std::mt19937_64 rng(sha256_prefix64(salt) + static_cast<std::uint64_t>(attempt));
        std::uniform_real_distribution<double> jitter(0.5, 1.5);
        double seconds = options.base_backoff_s * static_cast<double>(1 << attempt) * jitter(rng);
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    }

    // Retrying POST; returns the successful 2xx reply body.
    std::string perform(const ModelEndpoint& endpoint, const std::string& route,
                        const json& payload, const std::string& call_tag) {
        std::string body = payload.dump();
        SlotGuard guard(&slots_for(endpoint));
        int attempts = options.max_attempts > 0 ? options.max_attempts : 1;
        for (int attempt = 0; attempt < attempts; ++attempt) {
            WireReply reply = options.transport->post(endpoint, route, body, call_tag);
            bool last = attempt + 1 == attempts;
            if (reply.timed_out) {
                ledger.record_error(endpoint.name);
                if (last) throw Timeout(endpoint.name, call_tag);
                backoff_sleep(attempt, call_tag);
                continue;
            }
            if (reply.status == 429 || reply.status >= 500) {
                ledger.record_error(endpoint.name);
                if (last) {
                    if (reply.status == 429) throw RateLimited(endpoint.name, call_tag);
                    throw TransportError("upstream status " + std::to_string(reply.status),
                                         endpoint.name, call_tag);
                }
                backoff_sleep(attempt, call_tag);
                continue;
            }
            if (reply.status == 401 || reply.status == 403) {
                ledger.record_error(endpoint.name);
                throw AuthFailure(endpoint.name, call_tag);
            }
            if (reply.status == 0) {
                ledger.record_error(endpoint.name);
                throw TransportError("connection failed: " + reply.detail, endpoint.name, call_tag);
            }
            if (reply.status < 200 || reply.status >= 300) {
                ledger.record_error(endpoint.name);
                throw TransportError("upstream status " + std::to_string(reply.status),
                                     endpoint.name, call_tag);
            }
            return reply.body;
        }
        throw TransportError("retry loop exhausted", endpoint.name, call_tag);
    }
};

Gateway::Gateway() : Gateway(Options{}) {}
Gateway::Gateway(Options options) : impl_(std::make_unique<Impl>(std::move(options))) {}
Gateway::~Gateway() = default;

ChatResponse Gateway::chat(const ModelEndpoint& endpoint, const ChatRequest& request,
                           const std::string& call_tag) {
    if (request.system_prompt.empty() && request.user_prompt.empty())
        throw Error("chat: both prompts are empty");

    std::string key = endpoint.name + "|" + request_digest(request) + "|" + call_tag;
    if (auto hit = impl_->cache_get(key)) {
        ChatResponse response;
        response.text = hit->at("text").get<std::string>();
        response.prompt_tokens = hit->value("prompt_tokens", 0LL);
        response.completion_tokens = hit->value("completion_tokens", 0LL);
        response.cached = true;
        response.endpoint_name = endpoint.name;
        return response;
    }

    json payload{{"model", endpoint.wire_model()},
                 {"messages",
                  json::array({json{{"role", "system"}, {"content", request.system_prompt}},
                               json{{"role", "user"}, {"content", request.user_prompt}}})},
                 {"max_tokens", request.max_tokens}};
    if (endpoint.supports_temperature) payload["temperature"] = request.temperature;
    if (request.response_format == ResponseFormat::json_object)
        payload["response_format"] = json{{"type", "json_object"}};

    std::string body = impl_->perform(endpoint, "chat", payload, call_tag);

    ChatResponse response;
    response.endpoint_name = endpoint.name;
    try {
        json parsed = json::parse(body);
        response.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        if (parsed.contains("usage")) {
            response.prompt_tokens = parsed["usage"].value("prompt_tokens", 0LL);
            response.completion_tokens = parsed["usage"].value("completion_tokens", 0LL);
        }
    } catch (const json::exception& e) {
        impl_->ledger.record_error(endpoint.name);
        throw MalformedUpstreamResponse(e.what(), endpoint.name, call_tag);
    }

    impl_->ledger.record_success(endpoint.name, response.prompt_tokens,
                                 response.completion_tokens);
    impl_->cache_put(key, payload,
                     json{{"text", response.text},
                          {"prompt_tokens", response.prompt_tokens},
                          {"completion_tokens", response.completion_tokens}});
    return response;
}

std::vector<std::vector<double>> Gateway::embed(const ModelEndpoint& endpoint,
                                                const std::vector<std::string>& texts,
                                                const std::string& call_tag) {
    if (texts.empty()) throw Error("embed: texts must be non-empty");
    for (std::size_t i = 0; i < texts.size(); ++i) {
        bool blank = true;
        for (char c : texts[i])
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        if (blank) throw Error("embed: text at index " + std::to_string(i) + " is blank");
    }

    std::string key = endpoint.name + "|" + embed_digest(texts) + "|" + call_tag;
    json stored;
    if (auto hit = impl_->cache_get(key)) {
        stored = *hit;
    } else {
        json payload{{"model", endpoint.wire_model()}, {"input", texts}};
        std::string body = impl_->perform(endpoint, "embeddings", payload, call_tag);
        long long prompt_tokens = 0;
        json vectors = json::array();
        try {
            json parsed = json::parse(body);
            std::vector<std::pair<int, json>> indexed;
            for (const auto& row : parsed.at("data"))
                indexed.emplace_back(row.value("index", static_cast<int>(indexed.size())),
                                     row.at("embedding"));
            std::sort(indexed.begin(), indexed.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (auto& [idx, emb] : indexed) vectors.push_back(std::move(emb));
            if (parsed.contains("usage"))
                prompt_tokens = parsed["usage"].value("prompt_tokens", 0LL);
        } catch (const json::exception& e) {
            impl_->ledger.record_error(endpoint.name);
            throw MalformedUpstreamResponse(e.what(), endpoint.name, call_tag);
        }
        impl_->ledger.record_success(endpoint.name, prompt_tokens, 0);
        stored = json{{"vectors", vectors}};
        impl_->cache_put(key, json{{"model", endpoint.wire_model()}, {"input_count", texts.size()}},
                         stored);
    }

    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& vec : stored.at("vectors")) out.push_back(vec.get<std::vector<double>>());
    if (out.size() != texts.size())
        throw DimensionMismatch("expected " + std::to_string(texts.size()) + " vectors, got " +
                                std::to_string(out.size()));
    for (const auto& v : out) {
        if (v.size() != out.front().size())
            throw DimensionMismatch("ragged vectors: " + std::to_string(v.size()) + " vs " +
                                    std::to_string(out.front().size()));
    }
    return out;
}

UsageLedger& Gateway::ledger() { return impl_->ledger; }
const UsageLedger& Gateway::ledger() const { return impl_->ledger; }

long long Gateway::http_requests_total() {
    return g_http_requests.load(std::memory_order_relaxed);
}

}  // namespace groundbench::gateway
