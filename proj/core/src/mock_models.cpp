#include "groundbench/mock_models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "groundbench/digest.hpp"
#include "groundbench/gateway.hpp"

// Scripted stand-ins for remote models, selected with base_url
// "mock:<behavior>?<params>".  Dispatch happens on the call_tag, never on
// prompt wording, so prompt templates can evolve without breaking them.
// Two structural contracts are relied on instead:
//   * prompts that need source material (reformat/grade/extract) end with a
//     single-line JSON payload, and
//   * administered multiple-choice prompts list the options one per line as
//     "<LETTER>. <text>".
//
// Behaviors:
//   generator?topics=N      topic extraction, item generation, reformatting
//   responder?pattern=CCW&tpc=N&style=text|letter   answers benchmark items
//   judge?clarity=8&grounded=9&correct=9&valid=8&oob=<feature>  quality scores
//   grader                  grades open-ended answers, extracts MCQ letters
//   embedder?dim=N          deterministic unit vectors
//   file?path=P             replies scripted per call_tag from a JSON file
//
// Shared params: fail=N (first N posts per tag get status fail_status=429),
// bad_first=N (first N chat replies carry unparseable content inside a valid
// envelope), bad_wire_first=N (first N replies are not valid wire JSON).

namespace groundbench::gateway {

using nlohmann::json;

std::string mock_stem(const std::string& chunk_id, int topic_ordinal) {
    return chunk_id + ".t" + std::to_string(topic_ordinal);
}

std::string mock_topic_text(const std::string& chunk_id, int topic_ordinal) {
    return chunk_id + " theme " + std::to_string(topic_ordinal + 1);
}

std::string mock_question_text(const std::string& mode, const std::string& chunk_id,
                               int topic_ordinal) {
    return "What does the passage establish about " + mock_stem(chunk_id, topic_ordinal) +
           " (" + mode + ")?";
}

std::string mock_correct_option_text(const std::string& chunk_id, int topic_ordinal) {
    return "fact [key] " + mock_stem(chunk_id, topic_ordinal);
}

std::string mock_distractor_text(const std::string& chunk_id, int topic_ordinal,
                                 int distractor_index) {
    return "distractor " + mock_stem(chunk_id, topic_ordinal) + " " +
           std::to_string(distractor_index + 1);
}

std::string mock_explanation_text(const std::string& chunk_id, int topic_ordinal) {
    return "the passage states " + mock_stem(chunk_id, topic_ordinal) + " directly";
}

namespace {

struct MockSpec {
    std::string behavior;
    std::map<std::string, std::string> params;

    std::string get(const std::string& key, const std::string& fallback = "") const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
    int get_int(const std::string& key, int fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : std::stoi(it->second);
    }
};

MockSpec parse_spec(const std::string& base_url) {
    MockSpec spec;
    std::string rest = base_url.substr(5);  // past "mock:"
    std::size_t q = rest.find('?');
    spec.behavior = rest.substr(0, q == std::string::npos ? rest.size() : q);
    if (q != std::string::npos) {
        std::stringstream params(rest.substr(q + 1));
        std::string pair;
        while (std::getline(params, pair, '&')) {
            std::size_t eq = pair.find('=');
            if (eq == std::string::npos) continue;
            spec.params[pair.substr(0, eq)] = pair.substr(eq + 1);
        }
    }
    return spec;
}

// "<chunk_id>.t<k>.<mode>.<generator>", parsed from the right so chunk ids
// may contain '#' freely (endpoint names must not contain '.').
struct ParsedItemId {
    std::string chunk_id;
    int topic_ordinal = -1;  // -1 when the slot is not "t<k>"
    std::string mode;
};

std::optional<ParsedItemId> parse_item_id(const std::string& item_id) {
    std::size_t p3 = item_id.rfind('.');
    if (p3 == std::string::npos) return std::nullopt;
    std::size_t p2 = item_id.rfind('.', p3 - 1);
    if (p2 == std::string::npos) return std::nullopt;
    std::size_t p1 = item_id.rfind('.', p2 - 1);
    if (p1 == std::string::npos) return std::nullopt;

    ParsedItemId parsed;
    parsed.mode = item_id.substr(p2 + 1, p3 - p2 - 1);
    parsed.chunk_id = item_id.substr(0, p1);
    std::string slot = item_id.substr(p1 + 1, p2 - p1 - 1);
    if (slot.size() > 1 && slot[0] == 't' &&
        std::all_of(slot.begin() + 1, slot.end(),
                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        parsed.topic_ordinal = std::stoi(slot.substr(1));
    return parsed;
}

std::optional<int> chunk_ordinal(const std::string& chunk_id) {
    std::size_t hash = chunk_id.rfind('#');
    if (hash == std::string::npos || hash + 1 == chunk_id.size()) return std::nullopt;
    int value = 0;
    for (std::size_t i = hash + 1; i < chunk_id.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(chunk_id[i]))) return std::nullopt;
        value = value * 10 + (chunk_id[i] - '0');
    }
    return value;
}

std::string user_prompt_of(const std::string& body) {
    try {
        json parsed = json::parse(body);
        for (const auto& message : parsed.at("messages"))
            if (message.value("role", "") == "user") return message.value("content", "");
    } catch (const json::exception&) {
    }
    return "";
}

// The trailing single-line JSON payload (last line beginning with '{').
std::optional<json> trailing_payload(const std::string& prompt) {
    std::size_t pos = prompt.size();
    while (pos > 0) {
        std::size_t line_start = prompt.rfind('\n', pos - 1);
        std::size_t begin = line_start == std::string::npos ? 0 : line_start + 1;
        std::string line = prompt.substr(begin, pos - begin);
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first != std::string::npos && line[first] == '{') {
            try {
                return json::parse(line.substr(first));
            } catch (const json::exception&) {
                return std::nullopt;
            }
        }
        if (first != std::string::npos) return std::nullopt;  // non-blank, non-JSON tail
        if (line_start == std::string::npos) break;
        pos = line_start;
    }
    return std::nullopt;
}

// Option lines of an administered prompt: "<LETTER>. <text>".
std::vector<std::pair<char, std::string>> option_lines(const std::string& prompt) {
    std::vector<std::pair<char, std::string>> options;
    std::stringstream stream(prompt);
    std::string line;
    while (std::getline(stream, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.size() >= 3 && line[0] >= 'A' && line[0] <= 'Z' && line[1] == '.' &&
            line[2] == ' ')
            options.emplace_back(line[0], line.substr(3));
    }
    return options;
}

std::string fold(const std::string& text) {
    std::string out;
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

long long approx_tokens(const std::string& text) {
    return static_cast<long long>(text.size() / 4 + 1);
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::vector<std::string> split_tag(const std::string& call_tag) {
    std::vector<std::string> parts;
    std::stringstream stream(call_tag);
    std::string part;
    while (std::getline(stream, part, '/')) parts.push_back(part);
    return parts;
}

class MockTransport : public Transport {
public:
    WireReply post(const ModelEndpoint& endpoint, const std::string& route,
                   const std::string& body, const std::string& call_tag) override {
        MockSpec spec = parse_spec(endpoint.base_url);
        int seen;
        {
            std::lock_guard lock(mu_);
            seen = counts_[endpoint.name + "|" + call_tag]++;
        }
        if (seen < spec.get_int("fail", 0))
            return status_reply(spec.get_int("fail_status", 429), "scripted failure");
        if (seen < spec.get_int("bad_wire_first", 0))
            return WireReply{200, "mangled {{ wire", false, ""};

        std::string prompt = user_prompt_of(body);
        bool garble = seen < spec.get_int("bad_first", 0);

        if (spec.behavior == "embedder" && route == "embeddings")
            return embed_reply(spec, body);
        if (route != "chat") return status_reply(400, "route not supported: " + route);

        std::string text;
        if (spec.behavior == "generator")
            text = generator_reply(spec, call_tag, prompt);
        else if (spec.behavior == "responder")
            text = responder_reply(spec, call_tag, prompt);
        else if (spec.behavior == "judge")
            text = judge_reply(spec, call_tag);
        else if (spec.behavior == "grader")
            text = grader_reply(call_tag, prompt);
        else if (spec.behavior == "file")
            return file_reply(spec, call_tag, prompt);
        else
            return status_reply(400, "unknown mock behavior: " + spec.behavior);

        if (text.empty()) return status_reply(400, "unhandled call_tag: " + call_tag);
        if (garble) text = "not parseable }{";
        return chat_reply(prompt, text);
    }

private:
    std::mutex mu_;
    std::map<std::string, int> counts_;
    std::map<std::string, json> file_scripts_;

    static WireReply status_reply(int status, const std::string& detail) {
        WireReply reply;
        reply.status = status;
        reply.detail = detail;
        reply.body = json{{"error", {{"message", detail}}}}.dump();
        return reply;
    }

    static WireReply chat_reply(const std::string& prompt, const std::string& text,
                                long long prompt_tokens = -1, long long completion_tokens = -1) {
        json wire{{"choices", json::array({json{{"message", json{{"role", "assistant"},
                                                                 {"content", text}}}}})},
                  {"usage",
                   {{"prompt_tokens",
                     prompt_tokens >= 0 ? prompt_tokens : approx_tokens(prompt)},
                    {"completion_tokens",
                     completion_tokens >= 0 ? completion_tokens : approx_tokens(text)}}}};
        return WireReply{200, wire.dump(), false, ""};
    }

    std::string generator_reply(const MockSpec& spec, const std::string& call_tag,
                                const std::string& prompt) {
        auto parts = split_tag(call_tag);
        if (parts.size() == 2 && parts[0] == "topics") {
            int n = spec.get_int("topics", 4);
            json topics = json::array();
            for (int j = 0; j < n; ++j) topics.push_back(mock_topic_text(parts[1], j));
            return json{{"topics", topics}}.dump();
        }
        if (parts.size() == 4 && parts[0] == "item") {
            const std::string& mode = parts[1];
            const std::string& chunk_id = parts[2];
            if (parts[3].size() < 2 || parts[3][0] != 't') return "";
            int k = std::stoi(parts[3].substr(1));
            json item{{"question", mock_question_text(mode, chunk_id, k)},
                      {"justification", mock_explanation_text(chunk_id, k)}};
            if (mode == "mcq") {
                item["choices"] = json{{"A", mock_correct_option_text(chunk_id, k)},
                                       {"B", mock_distractor_text(chunk_id, k, 0)},
                                       {"C", mock_distractor_text(chunk_id, k, 1)},
                                       {"D", mock_distractor_text(chunk_id, k, 2)}};
                item["answer"] = "A";
            } else {
                item["answer"] = mock_correct_option_text(chunk_id, k);
            }
            return item.dump();
        }
        if (parts.size() >= 3 && parts[0] == "reformat") return reformat_reply(parts, prompt);
        return "";
    }

    static std::string reformat_reply(const std::vector<std::string>& parts,
                                      const std::string& prompt) {
        auto payload = trailing_payload(prompt);
        if (!payload) return "";
        const std::string& mode = parts[1];
        std::string question = payload->value("question", "");
        std::string gold = payload->value("answer", "");
        if (payload->contains("choices") && gold.size() == 1)
            gold = payload->at("choices").value(gold, gold);

        json item{{"question", "Put differently: " + question},
                  {"justification", "restates the original answer"}};
        if (mode == "mcq") {
            item["choices"] = json{{"A", gold},
                                   {"B", "unsupported alternative 1"},
                                   {"C", "unsupported alternative 2"},
                                   {"D", "unsupported alternative 3"}};
            item["answer"] = "A";
        } else {
            item["answer"] = gold;
        }
        return item.dump();
    }

    std::string responder_reply(const MockSpec& spec, const std::string& call_tag,
                                const std::string& prompt) {
        auto parts = split_tag(call_tag);
        if (parts.size() != 2 || parts[0] != "answer") return "";
        auto parsed = parse_item_id(parts[1]);
        if (!parsed) return "";

        std::string pattern = spec.get("pattern", "C");
        int tpc = spec.get_int("tpc", 4);
        std::size_t k;
        auto ord = chunk_ordinal(parsed->chunk_id);
        if (ord && parsed->topic_ordinal >= 0)
            k = static_cast<std::size_t>(*ord) * tpc + parsed->topic_ordinal;
        else
            k = static_cast<std::size_t>(sha256_prefix64(parts[1]));
        bool answer_correctly = std::toupper(pattern[k % pattern.size()]) == 'C';

        if (parsed->mode == "mcq") {
            auto options = option_lines(prompt);
            const std::pair<char, std::string>* chosen = nullptr;
            for (const auto& option : options) {
                bool keyed = option.second.find("[key]") != std::string::npos;
                if (keyed == answer_correctly) {
                    chosen = &option;
                    break;
                }
            }
            if (!chosen) return "no option found";
            if (spec.get("style", "text") == "letter")
                return std::string("The answer is ") + chosen->first + ".";
            return chosen->second;
        }
        if (answer_correctly && parsed->topic_ordinal >= 0)
            return mock_correct_option_text(parsed->chunk_id, parsed->topic_ordinal);
        if (answer_correctly) return "cannot reconstruct gold";
        return "the notes do not cover this";
    }

    static std::string judge_reply(const MockSpec& spec, const std::string& call_tag) {
        auto parts = split_tag(call_tag);
        double clarity = spec.get_int("clarity", 8);
        double grounded = spec.get_int("grounded", 9);
        double correct = spec.get_int("correct", 9);
        double valid = spec.get_int("valid", 8);
        std::string oob = spec.get("oob", "");
        if (parts.size() == 2 && parts[0] == "clarity")
            return json{{"clarity", oob == "clarity" ? 12.0 : clarity}}.dump();
        if (parts.size() == 2 && parts[0] == "judge")
            return json{{"groundedness", oob == "grounded" ? 0.0 : grounded},
                        {"answer_correctness", oob == "correct" ? 11.0 : correct},
                        {"explanation_validity", oob == "valid" ? -1.0 : valid}}
                .dump();
        return "";
    }

    static std::string grader_reply(const std::string& call_tag, const std::string& prompt) {
        auto parts = split_tag(call_tag);
        if (parts.size() == 2 && parts[0] == "extract") {
            auto payload = trailing_payload(prompt);
            if (!payload || !payload->contains("options")) return "none";
            std::string answer = fold(payload->value("answer_text", ""));
            for (const auto& [letter, text] : payload->at("options").items()) {
                std::string folded = fold(text.get<std::string>());
                if (!folded.empty() &&
                    (answer.find(folded) != std::string::npos || folded.find(answer) != std::string::npos))
                    return letter;
            }
            return "none";
        }
        if (!parts.empty() && parts[0] == "grade") {
            bool same;
            auto payload = trailing_payload(prompt);
            if (payload && payload->contains("gold") && payload->contains("candidate"))
                same = fold(payload->value("gold", "")) == fold(payload->value("candidate", "!"));
            else
                same = count_occurrences(prompt, "[key]") >= 2;
            return json{{"verdict", same ? "correct" : "incorrect"},
                        {"rationale", same ? "matches the reference answer"
                                           : "contradicts the reference answer"}}
                .dump();
        }
        return "";
    }

    static WireReply embed_reply(const MockSpec& spec, const std::string& body) {
        int dim = spec.get_int("dim", 8);
        json data = json::array();
        long long prompt_tokens = 0;
        try {
            json parsed = json::parse(body);
            int index = 0;
            for (const auto& entry : parsed.at("input")) {
                std::string text = entry.get<std::string>();
                prompt_tokens += approx_tokens(text);
                std::mt19937_64 rng(sha256_prefix64(text));
                std::normal_distribution<double> gauss(0.0, 1.0);
                std::vector<double> vec(dim);
                double norm_sq = 0.0;
                for (double& x : vec) {
                    x = gauss(rng);
                    norm_sq += x * x;
                }
                double norm = std::sqrt(norm_sq);
                for (double& x : vec) x /= norm;
                data.push_back(json{{"index", index++}, {"embedding", vec}});
            }
        } catch (const json::exception& e) {
            return status_reply(400, std::string("bad embeddings payload: ") + e.what());
        }
        json wire{{"data", data}, {"usage", {{"prompt_tokens", prompt_tokens}}}};
        return WireReply{200, wire.dump(), false, ""};
    }

    WireReply file_reply(const MockSpec& spec, const std::string& call_tag,
                         const std::string& prompt) {
        std::string path = spec.get("path");
        json script;
        {
            std::lock_guard lock(mu_);
            auto it = file_scripts_.find(path);
            if (it == file_scripts_.end()) {
                std::ifstream in(path);
                if (!in) return status_reply(500, "mock script missing: " + path);
                try {
                    in >> script;
                } catch (const json::exception& e) {
                    return status_reply(500, std::string("mock script unreadable: ") + e.what());
                }
                file_scripts_[path] = script;
            } else {
                script = it->second;
            }
        }
        json entry;
        if (script.contains(call_tag))
            entry = script[call_tag];
        else if (script.contains("*"))
            entry = script["*"];
        else
            return status_reply(500, "no script entry for tag: " + call_tag);

        if (entry.is_string()) {
            std::string value = entry.get<std::string>();
            if (value == "!timeout") return WireReply{0, "", true, "scripted timeout"};
            if (value == "!429") return status_reply(429, "scripted rate limit");
            if (value == "!500") return status_reply(500, "scripted server error");
            return chat_reply(prompt, value);
        }
        return chat_reply(prompt, entry.value("text", ""), entry.value("prompt_tokens", -1LL),
                          entry.value("completion_tokens", -1LL));
    }
};

}  // namespace

std::shared_ptr<Transport> make_mock_transport() { return std::make_shared<MockTransport>(); }

}  // namespace groundbench::gateway
