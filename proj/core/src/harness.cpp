#include "groundbench/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "groundbench/digest.hpp"
#include "groundbench/errors.hpp"
#include "groundbench/textutil.hpp"

namespace groundbench::harness {

using nlohmann::json;

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::correct: return "correct";
        case Verdict::incorrect: return "incorrect";
        default: return "unextractable";
    }
}

Verdict verdict_from_string(const std::string& name) {
    if (name == "correct") return Verdict::correct;
    if (name == "incorrect") return Verdict::incorrect;
    if (name == "unextractable") return Verdict::unextractable;
    throw Error("unknown verdict '" + name + "'");
}

json Transcript::to_json() const {
    json record{{"item_id", item_id},
                {"evaluated_model", evaluated_model},
                {"benchmark_id", benchmark_id},
                {"raw_response", raw_response},
                {"extracted", extracted},
                {"verdict", harness::to_string(verdict)}};
    if (shuffled) {
        std::string order(presented_order.begin(), presented_order.end());
        record["presented_order"] = order;
    }
    if (extraction_tier > 0) record["extraction_tier"] = extraction_tier;
    if (!rationale.empty()) record["rationale"] = rationale;
    if (!failure.empty()) record["failure"] = failure;
    return record;
}

Transcript Transcript::from_json(const json& record) {
    Transcript t;
    t.item_id = record.at("item_id").get<std::string>();
    t.evaluated_model = record.at("evaluated_model").get<std::string>();
    t.benchmark_id = record.value("benchmark_id", "");
    t.raw_response = record.value("raw_response", "");
    t.extracted = record.value("extracted", "");
    t.verdict = verdict_from_string(record.at("verdict").get<std::string>());
    if (record.contains("presented_order")) {
        std::string order = record["presented_order"].get<std::string>();
        if (order.size() != 4) throw Error("presented_order must have 4 letters");
        std::copy(order.begin(), order.end(), t.presented_order.begin());
        t.shuffled = true;
    }
    t.extraction_tier = record.value("extraction_tier", 0);
    t.rationale = record.value("rationale", "");
    t.failure = record.value("failure", "");
    return t;
}

json AccuracyMatrix::to_json() const {
    json models = json::object();
    for (const auto& [model, row] : cells) {
        json datasets = json::object();
        for (const auto& [dataset, cell] : row)
            datasets[dataset] = json{{"accuracy", cell.accuracy},
                                     {"n_items", cell.n_items},
                                     {"correct", cell.correct},
                                     {"unextractable", cell.unextractable}};
        models[model] = std::move(datasets);
    }
    return json{{"models", models}};
}

AccuracyMatrix AccuracyMatrix::from_json(const json& record) {
    AccuracyMatrix matrix;
    if (!record.contains("models") || !record["models"].is_object())
        throw Error("accuracy matrix JSON lacks a 'models' object");
    for (const auto& [model, row] : record["models"].items()) {
        for (const auto& [dataset, cell_json] : row.items()) {
            AccuracyCell cell;
            cell.accuracy = cell_json.at("accuracy").get<double>();
            cell.n_items = cell_json.value("n_items", 0);
            cell.correct = cell_json.value(
                "correct",
                static_cast<int>(cell.accuracy * cell.n_items + 0.5));
            cell.unextractable = cell_json.value("unextractable", 0);
            matrix.cells[model][dataset] = cell;
        }
    }
    return matrix;
}

std::string AccuracyMatrix::to_csv() const {
    std::set<std::string> datasets;
    for (const auto& [model, row] : cells)
        for (const auto& [dataset, cell] : row) datasets.insert(dataset);

    std::string csv = "model";
    for (const auto& dataset : datasets) csv += "," + dataset;
    csv += "\n";
    char buf[32];
    for (const auto& [model, row] : cells) {
        csv += model;
        for (const auto& dataset : datasets) {
            csv += ",";
            auto it = row.find(dataset);
            if (it != row.end()) {
                std::snprintf(buf, sizeof buf, "%.6f", it->second.accuracy);
                csv += buf;
            }
        }
        csv += "\n";
    }
    return csv;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

const char* kAnswerSystem =
    "You answer multiple-choice questions from memory. Reply with the letter of the "
    "correct option.";
const char* kOpenSystem =
    "You answer questions from memory, concisely and factually.";
const char* kExtractSystem =
    "You map a free-form answer onto lettered options. Reply with exactly one option "
    "letter, or the word none if no option matches. The material follows as JSON.";
const char* kGradeSystem =
    "You grade a candidate answer against a reference answer, judging factual "
    "equivalence rather than wording. Reply with a single JSON object "
    "{\"verdict\": \"correct\" or \"incorrect\", \"rationale\": \"one line\"}. "
    "The material follows as JSON.";

}  // namespace

std::array<int, 4> draw_permutation(std::uint64_t seed, const std::string& item_id) {
    std::uint64_t state = seed ^ sha256_prefix64(item_id);
    std::array<int, 4> perm{{0, 1, 2, 3}};
    for (int i = 3; i > 0; --i) {  // Fisher-Yates with a fixed, portable generator
        int j = static_cast<int>(splitmix64(state) % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

std::string mcq_prompt(const genesis::BenchmarkItem& item, const std::array<int, 4>& perm) {
    std::string prompt = item.question + "\n\n";
    for (int slot = 0; slot < 4; ++slot) {
        std::string original(1, static_cast<char>('A' + perm[slot]));
        prompt += std::string(1, static_cast<char>('A' + slot)) + ". " +
                  item.choices.at(original) + "\n";
    }
    prompt += "\nReply with the letter of the correct option.";
    return prompt;
}

std::string open_ended_prompt(const genesis::BenchmarkItem& item) {
    return item.question + "\n\nAnswer concisely.";
}

std::string extract_prompt(const std::string& raw_response,
                           const std::map<std::string, std::string>& presented_options) {
    json options = json::object();
    for (const auto& [letter, text] : presented_options) options[letter] = text;
    json payload{{"answer_text", raw_response}, {"options", options}};
    return "Which option does this answer pick?\n" + payload.dump();
}

std::string grade_prompt(const genesis::BenchmarkItem& item, const std::string& raw_response) {
    json payload{{"question", item.question},
                 {"gold", item.answer_text},
                 {"justification", item.justification},
                 {"candidate", raw_response}};
    return "Grade the candidate answer.\n" + payload.dump();
}

namespace {

// Tier 1: collect standalone uppercase letters (with light decoration) from
// the response; unambiguous only if exactly one distinct letter appears.
std::optional<char> pattern_letter(const std::string& raw,
                                   const std::map<std::string, std::string>& options) {
    std::set<char> candidates;
    std::stringstream stream(raw);
    std::string token;
    while (stream >> token) {
        std::size_t begin = 0, end = token.size();
        auto decor = [](char c) {
            return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' ||
                   c == '*' || c == '_' || c == '`' || c == '"' || c == '\'' || c == '.' ||
                   c == ',' || c == ':' || c == ';' || c == '!' || c == '?';
        };
        while (begin < end && decor(token[begin])) ++begin;
        while (end > begin && decor(token[end - 1])) --end;
        if (end - begin == 1 && options.count(std::string(1, token[begin])))
            candidates.insert(token[begin]);
    }
    if (candidates.size() == 1) return *candidates.begin();
    return std::nullopt;
}

// Tier 2: the response contains exactly one option's full text.
std::optional<char> containment_letter(const std::string& raw,
                                       const std::map<std::string, std::string>& options) {
    std::string folded = text::fold(raw);
    std::optional<char> match;
    for (const auto& [letter, option_text] : options) {
        std::string needle = text::fold(option_text);
        if (needle.empty() || folded.find(needle) == std::string::npos) continue;
        if (match) return std::nullopt;  // ambiguous
        match = letter[0];
    }
    return match;
}

}  // namespace

Extraction extract_choice(const std::string& raw_response,
                          const std::map<std::string, std::string>& presented_options,
                          gateway::Gateway* gateway, const gateway::ModelEndpoint* judge,
                          const std::string& call_tag) {
    if (auto letter = pattern_letter(raw_response, presented_options))
        return {letter, 1};
    if (auto letter = containment_letter(raw_response, presented_options))
        return {letter, 2};
    if (gateway && judge) {
        gateway::ChatRequest request;
        request.system_prompt = kExtractSystem;
        request.user_prompt = extract_prompt(raw_response, presented_options);
        request.temperature = 0.0;
        try {
            gateway::ChatResponse response = gateway->chat(*judge, request, call_tag);
            if (auto letter = pattern_letter(response.text, presented_options))
                return {letter, 3};
        } catch (const TransportError&) {
            // extraction stays unresolved; the transcript records it
        }
    }
    return {std::nullopt, 0};
}

Transcript administer_mcq_with_permutation(gateway::Gateway& gateway,
                                           const genesis::BenchmarkItem& item,
                                           const gateway::ModelEndpoint& model,
                                           const std::array<int, 4>& perm,
                                           const gateway::ModelEndpoint* judge) {
    if (item.mode != genesis::ItemMode::mcq)
        throw Error("administer_mcq: item '" + item.item_id + "' is not multiple-choice");

    Transcript t;
    t.item_id = item.item_id;
    t.evaluated_model = model.name;
    t.shuffled = true;
    for (int slot = 0; slot < 4; ++slot)
        t.presented_order[slot] = static_cast<char>('A' + perm[slot]);

    std::map<std::string, std::string> presented;
    for (int slot = 0; slot < 4; ++slot)
        presented[std::string(1, static_cast<char>('A' + slot))] =
            item.choices.at(std::string(1, static_cast<char>('A' + perm[slot])));

    gateway::ChatRequest request;
    request.system_prompt = kAnswerSystem;
    request.user_prompt = mcq_prompt(item, perm);
    request.temperature = 0.0;

    try {
        gateway::ChatResponse response = gateway.chat(model, request, "answer/" + item.item_id);
        t.raw_response = response.text;
    } catch (const TransportError& failure) {
        t.verdict = Verdict::unextractable;
        t.failure = failure.what();
        return t;
    }

    Extraction extraction = extract_choice(t.raw_response, presented, &gateway, judge,
                                           "extract/" + item.item_id);
    if (!extraction.letter) {
        t.verdict = Verdict::unextractable;
        return t;
    }
    t.extracted = std::string(1, *extraction.letter);
    t.extraction_tier = extraction.tier;
    char original = t.presented_order[*extraction.letter - 'A'];
    t.verdict = (std::string(1, original) == item.answer_letter) ? Verdict::correct
                                                                 : Verdict::incorrect;
    return t;
}

Transcript administer_mcq(gateway::Gateway& gateway, const genesis::BenchmarkItem& item,
                          const gateway::ModelEndpoint& model, std::uint64_t seed,
                          const gateway::ModelEndpoint* judge) {
    return administer_mcq_with_permutation(gateway, item, model,
                                           draw_permutation(seed, item.item_id), judge);
}

std::pair<Verdict, std::string> grade_open_ended(gateway::Gateway& gateway,
                                                 const genesis::BenchmarkItem& item,
                                                 const std::string& raw_response,
                                                 const gateway::ModelEndpoint& judge) {
    if (item.mode != genesis::ItemMode::open_ended)
        throw Error("grade_open_ended: item '" + item.item_id + "' is not open-ended");
    if (text::trim(raw_response).empty())
        return {Verdict::incorrect, "empty response"};

    gateway::ChatRequest request;
    request.system_prompt = kGradeSystem;
    request.user_prompt = grade_prompt(item, raw_response);
    request.temperature = 0.0;
    const std::string original_user = request.user_prompt;
    std::string call_tag = "grade/" + item.item_id;

    std::string reason;
    for (int attempt = 1; attempt <= 3; ++attempt) {
        std::string reply;
        try {
            reply = gateway.chat(judge, request, call_tag).text;
        } catch (const TransportError& failure) {
            return {Verdict::unextractable, failure.what()};
        }
        auto parsed = text::extract_json_value(reply);
        if (parsed && parsed->is_object() && parsed->contains("verdict") &&
            (*parsed)["verdict"].is_string()) {
            std::string verdict = text::fold((*parsed)["verdict"].get<std::string>());
            std::string rationale = parsed->value("rationale", "");
            if (verdict == "correct") return {Verdict::correct, rationale};
            if (verdict == "incorrect") return {Verdict::incorrect, rationale};
            reason = "verdict '" + verdict + "' is neither correct nor incorrect";
        } else {
            // fall back to a word scan before demanding a repair; punctuation
            // is stripped so "That is incorrect." still counts
            std::string folded = text::normalize_answer(reply);
            if (text::contains_word(folded, "incorrect")) return {Verdict::incorrect, reply};
            if (text::contains_word(folded, "correct")) return {Verdict::correct, reply};
            reason = "no verdict found in reply";
        }
        if (attempt == 3) break;
        request.user_prompt = original_user + "\n\nYour previous reply (attempt " +
                              std::to_string(attempt) + ") was rejected: " + reason +
                              ". Reply again with only the JSON verdict object.";
    }
    return {Verdict::unextractable, UnparseableVerdict(reason).what()};
}

Transcript administer_open_ended(gateway::Gateway& gateway,
                                 const genesis::BenchmarkItem& item,
                                 const gateway::ModelEndpoint& model,
                                 const gateway::ModelEndpoint& judge) {
    if (item.mode != genesis::ItemMode::open_ended)
        throw Error("administer_open_ended: item '" + item.item_id + "' is not open-ended");

    Transcript t;
    t.item_id = item.item_id;
    t.evaluated_model = model.name;

    gateway::ChatRequest request;
    request.system_prompt = kOpenSystem;
    request.user_prompt = open_ended_prompt(item);
    request.temperature = 0.0;

    try {
        gateway::ChatResponse response = gateway.chat(model, request, "answer/" + item.item_id);
        t.raw_response = response.text;
    } catch (const TransportError& failure) {
        t.verdict = Verdict::unextractable;
        t.failure = failure.what();
        return t;
    }

    auto [verdict, rationale] = grade_open_ended(gateway, item, t.raw_response, judge);
    t.verdict = verdict;
    t.rationale = rationale;
    t.extracted = text::trim(t.raw_response);
    return t;
}

EvalResult run_eval(gateway::Gateway& gateway, const genesis::Benchmark& benchmark,
                    const std::vector<gateway::ModelEndpoint>& models, std::uint64_t seed,
                    const gateway::ModelEndpoint* judge) {
    if (benchmark.items.empty()) throw Error("run_eval: benchmark is empty");
    if (models.empty()) throw Error("run_eval: no models to evaluate");
    if (benchmark.mode == genesis::ItemMode::open_ended && !judge)
        throw Error("run_eval: open-ended benchmarks need a judge endpoint");

    std::string dataset = benchmark.dataset.empty() ? benchmark.benchmark_id : benchmark.dataset;

    EvalResult result;
    for (const auto& model : models) {
        int correct = 0, unextractable = 0, failures = 0;
        for (const auto& item : benchmark.items) {
            Transcript t =
                benchmark.mode == genesis::ItemMode::mcq
                    ? administer_mcq(gateway, item, model, seed, judge)
                    : administer_open_ended(gateway, item, model, *judge);
            t.benchmark_id = benchmark.benchmark_id;
            if (t.verdict == Verdict::correct) ++correct;
            if (t.verdict == Verdict::unextractable) ++unextractable;
            if (!t.failure.empty()) ++failures;
            result.transcripts.push_back(std::move(t));
        }
        int n = static_cast<int>(benchmark.items.size());
        if (failures * 2 > n) {  // majority of calls never completed
            result.incomplete_models.push_back(model.name);
            continue;
        }
        AccuracyCell cell;
        cell.n_items = n;
        cell.correct = correct;
        cell.unextractable = unextractable;
        cell.accuracy = static_cast<double>(correct) / static_cast<double>(n);
        result.matrix.cells[model.name][dataset] = cell;
    }
    return result;
}

void save_transcripts(const std::vector<Transcript>& transcripts, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write transcripts: " + path);
    for (const auto& t : transcripts) out << t.to_json().dump() << "\n";
}

std::vector<Transcript> load_transcripts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read transcripts: " + path);
    std::vector<Transcript> transcripts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            transcripts.push_back(Transcript::from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw MalformedRecord(line_no, "transcript", e.what());
        }
    }
    return transcripts;
}

}  // namespace groundbench::harness
