#include "groundbench/run.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "groundbench/errors.hpp"

namespace groundbench::run {

using nlohmann::json;

const gateway::ModelEndpoint* RunConfig::find_endpoint(const std::string& name) const {
    for (const auto& ep : endpoints) {
        if (ep.name == name) return &ep;
    }
    return nullptr;
}

std::vector<gateway::ModelEndpoint> RunConfig::resolve(
        const std::vector<std::string>& names) const {
    std::vector<gateway::ModelEndpoint> out;
    out.reserve(names.size());
    for (const auto& name : names) {
        const auto* ep = find_endpoint(name);
        if (!ep) throw ConfigError("endpoints", "unknown endpoint '" + name + "'");
        out.push_back(*ep);
    }
    return out;
}

json RunConfig::to_json() const {
    json endpoints_json = json::array();
    for (const auto& ep : endpoints) {
        endpoints_json.push_back({
            {"name", ep.name},
            {"base_url", ep.base_url},
            {"api_key_env", ep.api_key_ref},  // the variable name, never its value
            {"model", ep.wire_model()},
            {"supports_temperature", ep.supports_temperature},
            {"max_concurrency", ep.max_concurrency},
            {"timeout_s", ep.request_timeout_s},
        });
    }
    json prices_json = json::object();
    for (const auto& [name, price] : prices) {
        prices_json[name] = {{"prompt_per_million", price.prompt_per_million},
                             {"completion_per_million", price.completion_per_million}};
    }
    return json{
        {"seed", seed},
        {"mode", genesis::to_string(mode)},
        {"dataset", dataset},
        {"docs", docs},
        {"endpoints", endpoints_json},
        {"generators", generator_names},
        {"judge", judge_name},
        {"embedder", embedder_name},
        {"evaluated_models", evaluated_model_names},
        {"chunking",
         {{"split_levels", chunk_policy.split_levels},
          {"min_chars", chunk_policy.min_chars},
          {"max_chars", chunk_policy.max_chars},
          {"merge_small", chunk_policy.merge_small},
          {"deny_sections", chunk_policy.deny_sections}}},
        {"max_topics", max_topics},
        {"drop_ceiling", drop_ceiling},
        {"thresholds",
         {{"answer_correctness", thresholds.min_answer_correctness},
          {"explanation_validity", thresholds.min_explanation_validity}}},
        {"prompt_template_version", prompt_template_version},
        {"reference_matrix", reference_matrix},
        {"prices", prices_json},
    };
}

namespace {

// Collects field errors so the whole config is reported in one pass.
class Checker {
public:
    explicit Checker(const json& root) : root_(root) {}

    void error(const std::string& field, const std::string& what) {
        errors_.emplace_back(field, what);
    }

    bool has(const std::string& key) const {
        return root_.contains(key) && !root_.at(key).is_null();
    }

    std::string str(const std::string& key, const std::string& fallback,
                    bool required = false) {
        if (!has(key)) {
            if (required) error(key, "required string is missing");
            return fallback;
        }
        if (!root_.at(key).is_string()) {
            error(key, "expected a string");
            return fallback;
        }
        return root_.at(key).get<std::string>();
    }

    long long integer(const std::string& key, long long fallback) {
        if (!has(key)) return fallback;
        if (!root_.at(key).is_number_integer()) {
            error(key, "expected an integer");
            return fallback;
        }
        return root_.at(key).get<long long>();
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        if (!root_.at(key).is_number()) {
            error(key, "expected a number");
            return fallback;
        }
        return root_.at(key).get<double>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        if (!root_.at(key).is_boolean()) {
            error(key, "expected a boolean");
            return fallback;
        }
        return root_.at(key).get<bool>();
    }

    std::vector<std::string> str_list(const std::string& key) {
        std::vector<std::string> out;
        if (!has(key)) return out;
        if (!root_.at(key).is_array()) {
            error(key, "expected an array of strings");
            return out;
        }
        std::size_t i = 0;
        for (const auto& entry : root_.at(key)) {
            if (!entry.is_string()) {
                error(key + "[" + std::to_string(i) + "]", "expected a string");
            } else {
                out.push_back(entry.get<std::string>());
            }
            ++i;
        }
        return out;
    }

    const std::vector<ConfigError::FieldError>& errors() const { return errors_; }
    void merge(const Checker& other) {
        errors_.insert(errors_.end(), other.errors_.begin(), other.errors_.end());
    }

private:
    const json& root_;
    std::vector<ConfigError::FieldError> errors_;
};

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_config(const json& config_json, const std::string& base_dir) {
    if (!config_json.is_object()) {
        throw ConfigError("config", "top level must be a JSON object");
    }
    Checker c(config_json);
    RunConfig cfg;

    cfg.seed = c.integer("seed", 0);
    const std::string mode_name = c.str("mode", "mcq");
    try {
        cfg.mode = genesis::mode_from_string(mode_name);
    } catch (const Error&) {
        c.error("mode", "expected \"mcq\" or \"open_ended\", got \"" + mode_name + "\"");
    }
    cfg.dataset = c.str("dataset", "");
    for (const auto& doc : c.str_list("docs")) {
        cfg.docs.push_back(resolve_path(base_dir, doc));
    }

    // Endpoint definitions.  Names act as cache-key and usage-ledger prefixes,
    // so the separator characters are banned outright.
    std::set<std::string> seen_names;
    if (c.has("endpoints")) {
        if (!config_json.at("endpoints").is_array()) {
            c.error("endpoints", "expected an array of endpoint objects");
        } else {
            std::size_t i = 0;
            for (const auto& entry : config_json.at("endpoints")) {
                const std::string where = "endpoints[" + std::to_string(i) + "]";
                if (!entry.is_object()) {
                    c.error(where, "expected an object");
                    ++i;
                    continue;
                }
                Checker ec(entry);
                gateway::ModelEndpoint ep;
                ep.name = ec.str("name", "", /*required=*/true);
                ep.base_url = ec.str("base_url", "", /*required=*/true);
                ep.api_key_ref = ec.str("api_key_env", "");
                ep.model = ec.str("model", "");
                ep.supports_temperature = ec.boolean("supports_temperature", true);
                ep.max_concurrency = static_cast<int>(ec.integer("max_concurrency", 4));
                ep.request_timeout_s = ec.number("timeout_s", 120.0);
                for (const auto& [field, what] : ec.errors()) c.error(where + "." + field, what);
                if (!ep.name.empty()) {
                    if (ep.name.find_first_of(".|/") != std::string::npos) {
                        c.error(where + ".name",
                                "endpoint names may not contain '.', '|', or '/'");
                    }
                    if (!seen_names.insert(ep.name).second) {
                        c.error(where + ".name", "duplicate endpoint name '" + ep.name + "'");
                    }
                }
                if (ep.max_concurrency < 1) c.error(where + ".max_concurrency", "must be >= 1");
                if (ep.request_timeout_s <= 0) c.error(where + ".timeout_s", "must be > 0");
                cfg.endpoints.push_back(std::move(ep));
                ++i;
            }
        }
    }

    auto check_ref = [&](const std::string& field, const std::string& name) {
        if (!name.empty() && !seen_names.count(name)) {
            c.error(field, "references undefined endpoint '" + name + "'");
        }
    };
    cfg.generator_names = c.str_list("generators");
    for (std::size_t i = 0; i < cfg.generator_names.size(); ++i) {
        check_ref("generators[" + std::to_string(i) + "]", cfg.generator_names[i]);
    }
    cfg.judge_name = c.str("judge", "");
    check_ref("judge", cfg.judge_name);
    cfg.embedder_name = c.str("embedder", "");
    check_ref("embedder", cfg.embedder_name);
    cfg.evaluated_model_names = c.str_list("evaluated_models");
    for (std::size_t i = 0; i < cfg.evaluated_model_names.size(); ++i) {
        check_ref("evaluated_models[" + std::to_string(i) + "]", cfg.evaluated_model_names[i]);
    }

    if (c.has("chunking")) {
        const auto& ch = config_json.at("chunking");
        if (!ch.is_object()) {
            c.error("chunking", "expected an object");
        } else {
            Checker cc(ch);
            if (cc.has("split_levels")) {
                cfg.chunk_policy.split_levels.clear();
                if (!ch.at("split_levels").is_array()) {
                    cc.error("split_levels", "expected an array of heading levels");
                } else {
                    for (const auto& lvl : ch.at("split_levels")) {
                        if (!lvl.is_number_integer() || lvl.get<int>() < 1 || lvl.get<int>() > 6) {
                            cc.error("split_levels", "levels must be integers in [1,6]");
                        } else {
                            cfg.chunk_policy.split_levels.insert(lvl.get<int>());
                        }
                    }
                    if (cfg.chunk_policy.split_levels.empty()) {
                        cc.error("split_levels", "needs at least one heading level");
                    }
                }
            }
            cfg.chunk_policy.min_chars = static_cast<int>(
                cc.integer("min_chars", cfg.chunk_policy.min_chars));
            cfg.chunk_policy.max_chars = static_cast<int>(
                cc.integer("max_chars", cfg.chunk_policy.max_chars));
            cfg.chunk_policy.merge_small = cc.boolean("merge_small", cfg.chunk_policy.merge_small);
            if (cc.has("deny_sections")) cfg.chunk_policy.deny_sections = cc.str_list("deny_sections");
            if (cfg.chunk_policy.min_chars < 0) cc.error("min_chars", "must be >= 0");
            if (cfg.chunk_policy.max_chars <= cfg.chunk_policy.min_chars) {
                cc.error("max_chars", "must be greater than min_chars");
            }
            for (const auto& [field, what] : cc.errors()) c.error("chunking." + field, what);
        }
    }

    cfg.max_topics = static_cast<int>(c.integer("max_topics", cfg.max_topics));
    if (cfg.max_topics < 1) c.error("max_topics", "must be >= 1");
    cfg.drop_ceiling = c.number("drop_ceiling", cfg.drop_ceiling);
    if (cfg.drop_ceiling < 0.0 || cfg.drop_ceiling > 1.0) {
        c.error("drop_ceiling", "must be within [0,1]");
    }

    if (c.has("thresholds")) {
        const auto& th = config_json.at("thresholds");
        if (!th.is_object()) {
            c.error("thresholds", "expected an object");
        } else {
            Checker tc(th);
            cfg.thresholds.min_answer_correctness =
                tc.number("answer_correctness", cfg.thresholds.min_answer_correctness);
            cfg.thresholds.min_explanation_validity =
                tc.number("explanation_validity", cfg.thresholds.min_explanation_validity);
            for (const auto& [field, what] : tc.errors()) c.error("thresholds." + field, what);
            auto in_scale = [](double v) { return v >= 1.0 && v <= 10.0; };
            if (!in_scale(cfg.thresholds.min_answer_correctness)) {
                c.error("thresholds.answer_correctness", "must be within the 1..10 scale");
            }
            if (!in_scale(cfg.thresholds.min_explanation_validity)) {
                c.error("thresholds.explanation_validity", "must be within the 1..10 scale");
            }
        }
    }

    cfg.prompt_template_version = c.str("prompt_template_version", cfg.prompt_template_version);
    cfg.reference_matrix = resolve_path(base_dir, c.str("reference_matrix", ""));

    if (c.has("prices")) {
        const auto& pj = config_json.at("prices");
        if (!pj.is_object()) {
            c.error("prices", "expected an object keyed by endpoint name");
        } else {
            for (const auto& [name, entry] : pj.items()) {
                if (!entry.is_object()) {
                    c.error("prices." + name, "expected an object");
                    continue;
                }
                Checker pc(entry);
                gateway::PriceEntry price;
                price.prompt_per_million = pc.number("prompt_per_million", 0.0);
                price.completion_per_million = pc.number("completion_per_million", 0.0);
                for (const auto& [field, what] : pc.errors()) {
                    c.error("prices." + name + "." + field, what);
                }
                if (price.prompt_per_million < 0 || price.completion_per_million < 0) {
                    c.error("prices." + name, "prices must be >= 0");
                }
                cfg.prices[name] = price;
            }
        }
    }

    if (!c.errors().empty()) throw ConfigError(c.errors());
    return cfg;
}

RunConfig validate_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    json parsed;
    try {
        parsed = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    return parse_config(parsed, base_dir);
}

}  // namespace groundbench::run
