#include "groundbench/quality.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "groundbench/errors.hpp"
#include "groundbench/textutil.hpp"

namespace groundbench::quality {

using nlohmann::json;

json QualityRecord::to_json() const {
    return json{{"item_id", item_id},
                {"question_token_count", question_token_count},
                {"clarity", clarity},
                {"groundedness", groundedness},
                {"answer_correctness", answer_correctness},
                {"explanation_validity", explanation_validity},
                {"judge_model", judge_model}};
}

QualityRecord QualityRecord::from_json(const json& record) {
    QualityRecord out;
    out.item_id = record.at("item_id").get<std::string>();
    out.question_token_count = record.at("question_token_count").get<int>();
    out.clarity = record.at("clarity").get<double>();
    out.groundedness = record.at("groundedness").get<double>();
    out.answer_correctness = record.at("answer_correctness").get<double>();
    out.explanation_validity = record.at("explanation_validity").get<double>();
    out.judge_model = record.value("judge_model", "");
    return out;
}

json DiversityReport::to_json() const {
    return json{{"benchmark_id", benchmark_id},
                {"mean_pairwise_cosine", mean_pairwise_cosine},
                {"n_items", n_items},
                {"embedder", embedder}};
}

int count_question_tokens(const std::string& question) {
    if (text::trim(question).empty())
        throw Error("count_question_tokens: question is empty");
    int count = 0;
    std::stringstream stream(question);
    std::string piece;
    while (stream >> piece) {
        std::size_t first = 0;
        while (first < piece.size() &&
               std::ispunct(static_cast<unsigned char>(piece[first])))
            ++first;
        if (first == piece.size()) {  // pure punctuation run
            ++count;
            continue;
        }
        std::size_t last = piece.size();
        while (last > first && std::ispunct(static_cast<unsigned char>(piece[last - 1])))
            --last;
        if (first > 0) ++count;        // leading punctuation run
        ++count;                       // the core
        if (last < piece.size()) ++count;  // trailing punctuation run
    }
    return count;
}

int count_question_tokens(const std::string& question, const TokenRule& rule) {
    if (text::trim(question).empty())
        throw Error("count_question_tokens: question is empty");
    return rule(question);
}

std::string clarity_system() {
    return "You rate how clear and comprehensible an evaluation question is in isolation, "
           "with no source material available. Reply with a single JSON object "
           "{\"clarity\": <number 1-10>} and nothing else.";
}

std::string clarity_user(const genesis::BenchmarkItem& item) {
    return "Rate this question:\n" + item.question;
}

std::string grounded_system() {
    return "You rate an evaluation question against the passage it was derived from, on "
           "1-10 scales: groundedness (is everything the question needs contained in the "
           "passage), answer_correctness (is the marked answer right given the passage), "
           "and explanation_validity (is the justification logically consistent). Reply "
           "with a single JSON object {\"groundedness\": n, \"answer_correctness\": n, "
           "\"explanation_validity\": n} and nothing else.";
}

std::string grounded_user(const genesis::BenchmarkItem& item) {
    std::string prompt = "PASSAGE:\n" + item.context + "\n\nQUESTION:\n" + item.question;
    if (item.mode == genesis::ItemMode::mcq) {
        prompt += "\n\nOPTIONS:";
        for (const auto& [letter, text] : item.choices)
            prompt += "\n" + letter + ". " + text;
        prompt += "\n\nMARKED ANSWER: " + item.answer_letter + " (" + item.answer_text + ")";
    } else {
        prompt += "\n\nREFERENCE ANSWER: " + item.answer_text;
    }
    prompt += "\n\nJUSTIFICATION:\n" + item.justification;
    return prompt;
}

namespace {

// One judged score: parse failures trigger up to two repair retries
// (UnparseableScores afterwards); out-of-range is an immediate error.
std::map<std::string, double> judged_scores(gateway::Gateway& gateway,
                                            const gateway::ModelEndpoint& judge,
                                            gateway::ChatRequest request,
                                            const std::string& call_tag,
                                            const std::vector<std::string>& keys) {
    const std::string original_user = request.user_prompt;
    std::string reason;
    for (int attempt = 1;; ++attempt) {
        gateway::ChatResponse response = gateway.chat(judge, request, call_tag);
        auto parsed = text::extract_json_value(response.text);
        if (parsed && parsed->is_object()) {
            std::map<std::string, double> scores;
            reason.clear();
            for (const auto& key : keys) {
                if (!parsed->contains(key) || !(*parsed)[key].is_number()) {
                    reason = "missing or non-numeric '" + key + "'";
                    break;
                }
                scores[key] = (*parsed)[key].get<double>();
            }
            if (reason.empty()) {
                for (const auto& [feature, value] : scores)
                    if (value < 1.0 || value > 10.0) throw OutOfRangeScore(feature, value);
                return scores;
            }
        } else {
            reason = "reply is not a JSON object";
        }
        if (attempt > 2) throw UnparseableScores(reason + " (after 2 repair retries)");
        request.user_prompt = original_user + "\n\nYour previous reply (attempt " +
                              std::to_string(attempt) + ") was rejected: " + reason +
                              ". Reply again with only the JSON object.";
    }
}

}  // namespace

QualityRecord judge_item(gateway::Gateway& gateway, const gateway::ModelEndpoint& judge,
                         const genesis::BenchmarkItem& item) {
    QualityRecord record;
    record.item_id = item.item_id;
    record.judge_model = judge.name;
    record.question_token_count = count_question_tokens(item.question);

    gateway::ChatRequest clarity_request;
    clarity_request.system_prompt = clarity_system();
    clarity_request.user_prompt = clarity_user(item);
    auto clarity_scores = judged_scores(gateway, judge, clarity_request,
                                        "clarity/" + item.item_id, {"clarity"});
    record.clarity = clarity_scores.at("clarity");

    gateway::ChatRequest grounded_request;
    grounded_request.system_prompt = grounded_system();
    grounded_request.user_prompt = grounded_user(item);
    auto grounded_scores =
        judged_scores(gateway, judge, grounded_request, "judge/" + item.item_id,
                      {"groundedness", "answer_correctness", "explanation_validity"});
    record.groundedness = grounded_scores.at("groundedness");
    record.answer_correctness = grounded_scores.at("answer_correctness");
    record.explanation_validity = grounded_scores.at("explanation_validity");
    return record;
}

QualityRecord judge_item(gateway::Gateway& gateway, const gateway::ModelEndpoint& judge,
                         const genesis::BenchmarkItem& item, const TokenRule& rule) {
    QualityRecord record = judge_item(gateway, judge, item);
    record.question_token_count = count_question_tokens(item.question, rule);
    return record;
}

double mean_pairwise_cosine(const std::vector<std::vector<double>>& vectors) {
    std::size_t n = vectors.size();
    if (n < 2) throw Error("mean_pairwise_cosine: need at least 2 vectors");
    std::size_t dim = vectors.front().size();
    if (dim == 0) throw DimensionMismatch("zero-dimensional vectors");

    // Sum of unit vectors: sum over i<j of cos(i,j) = (|S|^2 - n) / 2.
    std::vector<double> sum(dim, 0.0);
    for (const auto& vec : vectors) {
        if (vec.size() != dim)
            throw DimensionMismatch(std::to_string(vec.size()) + " vs " + std::to_string(dim));
        double norm_sq = 0.0;
        for (double x : vec) norm_sq += x * x;
        if (norm_sq == 0.0) throw Error("mean_pairwise_cosine: zero vector");
        double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t d = 0; d < dim; ++d) sum[d] += vec[d] * inv;
    }
    double total_sq = 0.0;
    for (double s : sum) total_sq += s * s;
    double pair_sum = (total_sq - static_cast<double>(n)) / 2.0;
    double pair_count = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return pair_sum / pair_count;
}

DiversityReport benchmark_diversity(gateway::Gateway& gateway,
                                    const gateway::ModelEndpoint& embedder,
                                    const genesis::Benchmark& benchmark) {
    if (benchmark.items.size() < 2)
        throw Error("benchmark_diversity: need at least 2 items");
    std::vector<std::string> questions;
    questions.reserve(benchmark.items.size());
    for (const auto& item : benchmark.items) questions.push_back(item.question);
    auto vectors = gateway.embed(embedder, questions, "embed/" + benchmark.benchmark_id);

    DiversityReport report;
    report.benchmark_id = benchmark.benchmark_id;
    report.mean_pairwise_cosine = mean_pairwise_cosine(vectors);
    report.n_items = static_cast<int>(benchmark.items.size());
    report.embedder = embedder.name;
    return report;
}

FilterOutcome filter_by_quality(const genesis::Benchmark& benchmark,
                                const std::vector<QualityRecord>& records,
                                const QualityThresholds& thresholds) {
    std::map<std::string, const QualityRecord*> by_id;
    for (const auto& record : records) by_id[record.item_id] = &record;

    FilterOutcome outcome;
    outcome.kept = benchmark;
    outcome.kept.items.clear();
    outcome.kept.benchmark_id = benchmark.benchmark_id + "-filtered";
    for (const auto& item : benchmark.items) {
        auto it = by_id.find(item.item_id);
        if (it == by_id.end()) throw MissingRecord(item.item_id);
        const QualityRecord& record = *it->second;
        if (record.answer_correctness < thresholds.min_answer_correctness)
            outcome.dropped.push_back(
                {item.item_id, "answer_correctness", record.answer_correctness});
        else if (record.explanation_validity < thresholds.min_explanation_validity)
            outcome.dropped.push_back(
                {item.item_id, "explanation_validity", record.explanation_validity});
        else
            outcome.kept.items.push_back(item);
    }
    return outcome;
}

void save_records(const std::vector<QualityRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write quality records: " + path);
    for (const auto& record : records) out << record.to_json().dump() << "\n";
}

std::vector<QualityRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read quality records: " + path);
    std::vector<QualityRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            records.push_back(QualityRecord::from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw MalformedRecord(line_no, "quality", e.what());
        }
    }
    return records;
}

}  // namespace groundbench::quality
