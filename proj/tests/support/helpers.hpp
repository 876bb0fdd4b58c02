#pragma once

// Shared test plumbing: brute-force reference implementations (kept
// deliberately naive and independent of the library's formulas), a temp-dir
// guard, a capturing transport, and small item builders.

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "groundbench/gateway.hpp"
#include "groundbench/genesis.hpp"

namespace oracle {

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Direct sum formula: r = (n*Sxy - Sx*Sy) / sqrt((n*Sxx - Sx^2)(n*Syy - Sy^2)).
inline double pearson_sums(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        syy += ys[i] * ys[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// Rank via counting: 1 + (#smaller) + (#equal - 1)/2, O(n^2) on purpose.
inline std::vector<double> ranks_naive(const std::vector<double>& values) {
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t smaller = 0, equal = 0;
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (values[j] < values[i]) ++smaller;
            if (values[j] == values[i]) ++equal;
        }
        ranks[i] = 1.0 + static_cast<double>(smaller) +
                   (static_cast<double>(equal) - 1.0) / 2.0;
    }
    return ranks;
}

inline double spearman_naive(const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearson_sums(ranks_naive(xs), ranks_naive(ys));
}

// Normal-equation slope: (n*Sxy - Sx*Sy) / (n*Sxx - Sx^2).
inline double slope_normal_eq(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double cosine_naive(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// All unordered pairs, quadratic.
inline double mean_pairwise_cosine_naive(const std::vector<std::vector<double>>& vs) {
    double total = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            total += cosine_naive(vs[i], vs[j]);
            ++pairs;
        }
    return total / static_cast<double>(pairs);
}

// Independent restatement of the token rule via alnum classification instead
// of ispunct: whitespace pieces, with leading/trailing non-alphanumeric runs
// counted as their own tokens.
inline int token_count_naive(const std::string& question) {
    std::istringstream in(question);
    std::string piece;
    int count = 0;
    auto word_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    while (in >> piece) {
        std::size_t first = piece.size();
        for (std::size_t i = 0; i < piece.size(); ++i) {
            if (word_char(piece[i])) {
                first = i;
                break;
            }
        }
        if (first == piece.size()) {
            ++count;  // nothing alphanumeric at all
            continue;
        }
        std::size_t last = 0;
        for (std::size_t i = piece.size(); i > 0; --i) {
            if (word_char(piece[i - 1])) {
                last = i;
                break;
            }
        }
        if (first > 0) ++count;
        ++count;
        if (last < piece.size()) ++count;
    }
    return count;
}

}  // namespace oracle

namespace testutil {

inline std::filesystem::path fixtures_dir() {
    return std::filesystem::path(GROUNDBENCH_FIXTURES_DIR);
}

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& stem = "groundbench-test") {
        auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto candidate = base / (stem + "-" + std::to_string(rng()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline groundbench::gateway::ModelEndpoint mock_endpoint(const std::string& name,
                                                         const std::string& base_url) {
    groundbench::gateway::ModelEndpoint ep;
    ep.name = name;
    ep.base_url = base_url;
    return ep;
}

// Transport that records every post and answers through a caller-set hook.
class CaptureTransport : public groundbench::gateway::Transport {
public:
    struct Call {
        std::string endpoint;
        std::string route;
        std::string body;
        std::string call_tag;
    };

    using Hook = std::function<groundbench::gateway::WireReply(const Call&)>;

    explicit CaptureTransport(Hook hook = {}) : hook_(std::move(hook)) {
        if (!hook_) {
            hook_ = [](const Call& call) {
                nlohmann::json wire{
                    {"choices",
                     nlohmann::json::array(
                         {nlohmann::json{{"message", {{"role", "assistant"},
                                                      {"content", "ok: " + call.call_tag}}}}})},
                    {"usage", {{"prompt_tokens", 7}, {"completion_tokens", 3}}}};
                return groundbench::gateway::WireReply{200, wire.dump(), false, ""};
            };
        }
    }

    groundbench::gateway::WireReply post(const groundbench::gateway::ModelEndpoint& endpoint,
                                         const std::string& route, const std::string& body,
                                         const std::string& call_tag) override {
        Call call{endpoint.name, route, body, call_tag};
        groundbench::gateway::WireReply reply;
        {
            std::lock_guard lock(mu_);
            calls_.push_back(call);
        }
        reply = hook_(call);
        return reply;
    }

    std::vector<Call> calls() const {
        std::lock_guard lock(mu_);
        return calls_;
    }
    std::size_t call_count() const {
        std::lock_guard lock(mu_);
        return calls_.size();
    }

private:
    mutable std::mutex mu_;
    std::vector<Call> calls_;
    Hook hook_;
};

inline groundbench::genesis::BenchmarkItem sample_mcq_item(const std::string& suffix = "0") {
    groundbench::genesis::BenchmarkItem item;
    item.item_id = "doc#" + suffix + ".t0.mcq.genA";
    item.mode = groundbench::genesis::ItemMode::mcq;
    item.chunk_id = "doc#" + suffix;
    item.topic = "station power";
    item.context = "The station's diesel generator supplies 40 kW continuous, with a battery "
                   "bank covering the nightly maintenance window.";
    item.question = "What is the continuous power rating of the station generator?";
    item.choices = {{"A", "40 kW"}, {"B", "25 kW"}, {"C", "60 kW"}, {"D", "12 kW"}};
    item.answer_letter = "A";
    item.answer_text = "40 kW";
    item.justification = "The passage states the diesel generator supplies 40 kW continuous.";
    item.generating_model = "genA";
    return item;
}

inline groundbench::genesis::BenchmarkItem sample_open_item(const std::string& suffix = "0") {
    groundbench::genesis::BenchmarkItem item;
    item.item_id = "doc#" + suffix + ".t0.open_ended.genA";
    item.mode = groundbench::genesis::ItemMode::open_ended;
    item.chunk_id = "doc#" + suffix;
    item.topic = "station power";
    item.context = "The station's diesel generator supplies 40 kW continuous, with a battery "
                   "bank covering the nightly maintenance window.";
    item.question = "What covers the station's load during the nightly maintenance window?";
    item.answer_text = "the battery bank";
    item.justification = "The passage says the battery bank covers the nightly window.";
    item.generating_model = "genA";
    return item;
}

}  // namespace testutil
