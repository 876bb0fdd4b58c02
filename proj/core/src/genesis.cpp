#include "groundbench/genesis.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "groundbench/digest.hpp"
#include "groundbench/errors.hpp"
#include "groundbench/textutil.hpp"

namespace groundbench::genesis {

using nlohmann::json;
using text::contains_word;
using text::extract_json_value;
using text::fold;
using text::normalize_answer;
using text::trim;

std::string to_string(ItemMode mode) { return mode == ItemMode::mcq ? "mcq" : "open_ended"; }

ItemMode mode_from_string(const std::string& name) {
    if (name == "mcq") return ItemMode::mcq;
    if (name == "open_ended") return ItemMode::open_ended;
    throw Error("unknown item mode '" + name + "' (expected mcq or open_ended)");
}

namespace {

const char* const kLetters[] = {"A", "B", "C", "D"};

}  // namespace

json BenchmarkItem::to_json() const {
    json record{{"item_id", item_id},
                {"mode", genesis::to_string(mode)},
                {"chunk_id", chunk_id},
                {"topic", topic},
                {"context", context},
                {"question", question},
                {"justification", justification},
                {"generating_model", generating_model}};
    if (mode == ItemMode::mcq) {
        record["choices"] = choices;
        record["answer"] = answer_letter;
    } else {
        record["answer"] = answer_text;
    }
    return record;
}

BenchmarkItem BenchmarkItem::from_json(const json& record) {
    if (!record.is_object()) throw SchemaViolation("item record is not a JSON object");
    BenchmarkItem item;
    auto str = [&](const char* key, bool required) -> std::string {
        if (!record.contains(key)) {
            if (required) throw SchemaViolation(std::string("missing key '") + key + "'");
            return "";
        }
        if (!record[key].is_string())
            throw SchemaViolation(std::string("key '") + key + "' is not a string");
        return record[key].get<std::string>();
    };
    item.item_id = str("item_id", true);
    item.mode = mode_from_string(str("mode", true));
    item.chunk_id = str("chunk_id", true);
    item.topic = str("topic", false);
    item.context = str("context", true);
    item.question = str("question", true);
    item.justification = str("justification", true);
    item.generating_model = str("generating_model", true);
    std::string answer = str("answer", true);
    if (item.mode == ItemMode::mcq) {
        if (!record.contains("choices") || !record["choices"].is_object())
            throw SchemaViolation("mcq item lacks a choices object");
        for (const auto& [key, value] : record["choices"].items()) {
            if (!value.is_string())
                throw SchemaViolation("choice '" + key + "' is not a string");
            item.choices[key] = value.get<std::string>();
        }
        item.answer_letter = answer;
        auto it = item.choices.find(answer);
        item.answer_text = it == item.choices.end() ? "" : it->second;
    } else {
        item.answer_text = answer;
    }
    auto reasons = validate_item(item);
    if (!reasons.empty()) {
        std::string joined;
        for (const auto& r : reasons) joined += (joined.empty() ? "" : "; ") + r;
        throw SchemaViolation(joined);
    }
    return item;
}

std::vector<std::string> validate_content(const BenchmarkItem& item) {
    std::vector<std::string> reasons;
    if (trim(item.question).empty()) reasons.push_back("question is empty");
    if (trim(item.justification).empty()) reasons.push_back("justification is empty");
    if (item.mode == ItemMode::mcq) {
        if (item.choices.size() != 4) {
            reasons.push_back("expected exactly 4 choices, got " +
                              std::to_string(item.choices.size()));
        } else {
            for (const char* letter : kLetters)
                if (!item.choices.count(letter))
                    reasons.push_back(std::string("missing choice '") + letter + "'");
        }
        std::set<std::string> distinct;
        for (const auto& [letter, text] : item.choices) {
            if (trim(text).empty()) reasons.push_back("choice '" + letter + "' is empty");
            if (!distinct.insert(fold(text)).second)
                reasons.push_back("duplicate option text '" + text + "'");
        }
        bool letter_ok = item.answer_letter.size() == 1 && item.answer_letter[0] >= 'A' &&
                         item.answer_letter[0] <= 'D';
        if (!letter_ok)
            reasons.push_back("answer letter '" + item.answer_letter + "' not in A..D");
        else if (item.choices.count(item.answer_letter) &&
                 item.answer_text != item.choices.at(item.answer_letter))
            reasons.push_back("answer_text does not equal choices[answer_letter]");
    } else {
        if (!item.choices.empty()) reasons.push_back("open-ended item carries choices");
        if (!item.answer_letter.empty())
            reasons.push_back("open-ended item carries an answer letter");
        if (trim(item.answer_text).empty()) reasons.push_back("answer_text is empty");
    }
    return reasons;
}

std::vector<std::string> validate_item(const BenchmarkItem& item) {
    std::vector<std::string> reasons = validate_content(item);
    if (trim(item.item_id).empty()) reasons.push_back("item_id is empty");
    if (trim(item.chunk_id).empty()) reasons.push_back("chunk_id is empty");
    if (trim(item.context).empty()) reasons.push_back("context is empty");
    if (trim(item.generating_model).empty()) reasons.push_back("generating_model is empty");
    return reasons;
}

BenchmarkItem parse_generated_item(const std::string& reply_text, ItemMode mode) {
    auto parsed = extract_json_value(reply_text);
    if (!parsed) throw SchemaViolation("reply contains no parseable JSON");
    if (!parsed->is_object()) throw SchemaViolation("reply JSON is not an object");
    const json& record = *parsed;

    BenchmarkItem item;
    item.mode = mode;
    if (!record.contains("question") || !record["question"].is_string())
        throw SchemaViolation("missing or non-string 'question'");
    item.question = trim(record["question"].get<std::string>());
    if (record.contains("justification") && record["justification"].is_string())
        item.justification = trim(record["justification"].get<std::string>());

    if (mode == ItemMode::mcq) {
        if (!record.contains("choices") || !record["choices"].is_object())
            throw SchemaViolation("missing or non-object 'choices'");
        for (const auto& [key, value] : record["choices"].items()) {
            if (!value.is_string())
                throw SchemaViolation("choice '" + key + "' is not a string");
            item.choices[key] = trim(value.get<std::string>());
        }
        if (!record.contains("answer") || !record["answer"].is_string())
            throw SchemaViolation("missing or non-string 'answer'");
        std::string answer = trim(record["answer"].get<std::string>());
        if (answer.size() == 1)
            answer[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(answer[0])));
        item.answer_letter = answer;
        auto it = item.choices.find(answer);
        item.answer_text = it == item.choices.end() ? "" : it->second;
    } else {
        if (record.contains("choices"))
            throw SchemaViolation("open-ended reply carries 'choices'");
        if (!record.contains("answer") || !record["answer"].is_string())
            throw SchemaViolation("missing or non-string 'answer'");
        item.answer_text = trim(record["answer"].get<std::string>());
    }

    auto reasons = validate_content(item);
    if (!reasons.empty()) {
        std::string joined;
        for (const auto& r : reasons) joined += (joined.empty() ? "" : "; ") + r;
        throw SchemaViolation(joined);
    }
    return item;
}

const char* PromptTemplates::version() { return "v1"; }

std::string PromptTemplates::topics_system() {
    return "You identify topics inside technical source material that would make high "
           "quality, difficult questions for evaluating a domain expert. Reply with a "
           "single JSON object in a fenced code block, shaped as "
           "{\"topics\": [\"...\"]}. Each topic is a short noun phrase under 200 "
           "characters. Do not number them and do not repeat yourself.";
}

std::string PromptTemplates::topics_user(const corpus::ContextChunk& chunk, int max_topics) {
    return "Propose at most " + std::to_string(max_topics) +
           " distinct topics present in the passage below that are worth testing an "
           "expert on.\n\nPASSAGE:\n" +
           chunk.text;
}

std::string PromptTemplates::item_system(ItemMode mode) {
    std::string common =
        "You write one difficult, self-contained evaluation question grounded in a "
        "passage. The question must be answerable by an expert without seeing the "
        "passage, so name the subject explicitly instead of writing 'according to the "
        "text'. Reply with a single JSON object in a fenced code block.";
    if (mode == ItemMode::mcq)
        return common +
               " Use keys: question, choices (an object with exactly the keys A, B, C, D "
               "holding distinct plausible options, exactly one correct), answer (the "
               "correct letter), justification (why that answer is right, citing the "
               "passage).";
    return common +
           " Use keys: question, answer (a short reference answer), justification (why "
           "that answer is right, citing the passage).";
}

std::string PromptTemplates::item_user(const corpus::ContextChunk& chunk, const Topic& topic,
                                       ItemMode mode) {
    return "Write one " +
           std::string(mode == ItemMode::mcq ? "multiple-choice" : "open-ended") +
           " question about the topic \"" + topic.text +
           "\", grounded strictly in this passage.\n\nPASSAGE:\n" + chunk.text;
}

std::string PromptTemplates::reformat_system(ItemMode target) {
    std::string common =
        "You rewrite an existing question/answer pair so the question is answerable "
        "without its source passage: disambiguate references, name entities, and keep "
        "the original correct answer. Yes/no/maybe answers must be expanded into full "
        "statements that still contain the original verdict. Reply with a single JSON "
        "object in a fenced code block.";
    if (target == ItemMode::mcq)
        return common +
               " Use keys: question, choices (object with exactly keys A, B, C, D; one "
               "option preserves the original correct answer verbatim or minimally "
               "rephrased, the other three are believable but wrong), answer (the "
               "correct letter), justification.";
    return common + " Use keys: question, answer (the original correct answer), justification.";
}

std::string PromptTemplates::reformat_user(const corpus::HumanItem& human, ItemMode target) {
    json payload{{"context", human.context}, {"question", human.question}};
    if (human.choices) {
        json choices;
        for (int i = 0; i < 4; ++i) choices[kLetters[i]] = (*human.choices)[i];
        payload["choices"] = choices;
        payload["answer"] = std::string(1, human.answer_letter.value_or('A'));
    } else {
        payload["answer"] = human.answer_text;
    }
    return "Rewrite the following item as a self-contained " +
           std::string(target == ItemMode::mcq ? "multiple-choice" : "open-ended") +
           " question. The source tuple follows as JSON:\n" + payload.dump();
}

std::string PromptTemplates::repair_suffix(const std::string& reason, int attempt) {
    return "\n\nYour previous reply (attempt " + std::to_string(attempt) +
           ") was rejected: " + reason +
           ". Reply again with only the corrected JSON object in a fenced code block.";
}

namespace {

// Runs request -> parse with up to two format-repair retries.  parse throws
// SchemaViolation (or returns errors via `reason`) to trigger a repair.
template <typename Parse>
auto with_repairs(gateway::Gateway& gateway, const gateway::ModelEndpoint& endpoint,
                  gateway::ChatRequest request, const std::string& call_tag, Parse parse) {
    std::string reason;
    const std::string original_user = request.user_prompt;
    for (int attempt = 1;; ++attempt) {
        gateway::ChatResponse response = gateway.chat(endpoint, request, call_tag);
        try {
            return parse(response.text);
        } catch (const SchemaViolation& violation) {
            reason = violation.reason;
        }
        if (attempt > 2) throw SchemaViolation(reason + " (after 2 repair retries)");
        request.user_prompt = original_user + PromptTemplates::repair_suffix(reason, attempt);
    }
}

std::vector<Topic> parse_topic_reply(const std::string& reply, const std::string& chunk_id,
                                     int max_topics) {
    auto parsed = extract_json_value(reply);
    if (!parsed) throw SchemaViolation("reply contains no parseable JSON");
    const json* list = nullptr;
    if (parsed->is_array())
        list = &*parsed;
    else if (parsed->is_object() && parsed->contains("topics") && (*parsed)["topics"].is_array())
        list = &(*parsed)["topics"];
    else
        throw SchemaViolation("expected {\"topics\": [...]} or a bare JSON array");

    std::vector<Topic> topics;
    std::set<std::string> seen;
    for (const auto& entry : *list) {
        if (!entry.is_string()) throw SchemaViolation("topic entries must be strings");
        std::string text = trim(entry.get<std::string>());
        if (text.empty()) throw SchemaViolation("topic entries must be non-empty");
        if (text.size() > 200)
            throw SchemaViolation("topic exceeds 200 characters: '" + text.substr(0, 40) +
                                  "...'");
        if (!seen.insert(fold(text)).second) continue;  // case-insensitive dedup
        Topic topic;
        topic.chunk_id = chunk_id;
        topic.text = text;
        topic.ordinal = static_cast<int>(topics.size());
        topics.push_back(std::move(topic));
        if (static_cast<int>(topics.size()) == max_topics) break;
    }
    return topics;
}

}  // namespace

std::vector<Topic> extract_topics(gateway::Gateway& gateway,
                                  const gateway::ModelEndpoint& generator,
                                  const corpus::ContextChunk& chunk, int max_topics) {
    if (trim(chunk.text).empty()) throw Error("extract_topics: chunk text is empty");
    if (max_topics < 1) throw Error("extract_topics: max_topics must be >= 1");

    gateway::ChatRequest request;
    request.system_prompt = PromptTemplates::topics_system();
    request.user_prompt = PromptTemplates::topics_user(chunk, max_topics);
    std::string call_tag = "topics/" + chunk.chunk_id;

    std::vector<Topic> topics;
    try {
        topics = with_repairs(gateway, generator, request, call_tag,
                              [&](const std::string& reply) {
                                  return parse_topic_reply(reply, chunk.chunk_id, max_topics);
                              });
    } catch (const SchemaViolation& violation) {
        throw UnparseableTopicList(violation.reason);
    }
    if (topics.empty()) throw EmptyTopicList();
    return topics;
}

namespace {

BenchmarkItem generate_item(gateway::Gateway& gateway, const gateway::ModelEndpoint& generator,
                            const corpus::ContextChunk& chunk, const Topic& topic,
                            ItemMode mode) {
    if (topic.chunk_id != chunk.chunk_id)
        throw Error("topic '" + topic.text + "' belongs to chunk '" + topic.chunk_id +
                    "', not '" + chunk.chunk_id + "'");

    gateway::ChatRequest request;
    request.system_prompt = PromptTemplates::item_system(mode);
    request.user_prompt = PromptTemplates::item_user(chunk, topic, mode);
    std::string call_tag =
        "item/" + to_string(mode) + "/" + chunk.chunk_id + "/t" + std::to_string(topic.ordinal);

    BenchmarkItem item = with_repairs(
        gateway, generator, request, call_tag,
        [&](const std::string& reply) { return parse_generated_item(reply, mode); });

    item.item_id = chunk.chunk_id + ".t" + std::to_string(topic.ordinal) + "." +
                   to_string(mode) + "." + generator.name;
    item.chunk_id = chunk.chunk_id;
    item.topic = topic.text;
    item.context = chunk.text;
    item.generating_model = generator.name;

    auto reasons = validate_item(item);
    if (!reasons.empty()) throw SchemaViolation(reasons.front());
    return item;
}

}  // namespace

BenchmarkItem generate_mcq(gateway::Gateway& gateway, const gateway::ModelEndpoint& generator,
                           const corpus::ContextChunk& chunk, const Topic& topic) {
    return generate_item(gateway, generator, chunk, topic, ItemMode::mcq);
}

BenchmarkItem generate_open_ended(gateway::Gateway& gateway,
                                  const gateway::ModelEndpoint& generator,
                                  const corpus::ContextChunk& chunk, const Topic& topic) {
    return generate_item(gateway, generator, chunk, topic, ItemMode::open_ended);
}

BenchmarkItem reformat_human_item(gateway::Gateway& gateway,
                                  const gateway::ModelEndpoint& reformatter,
                                  const corpus::HumanItem& human, ReformatMode mode) {
    if (trim(human.context).empty() || trim(human.question).empty())
        throw Error("reformat: human item '" + human.item_id +
                    "' needs non-empty context and question");

    if (mode == ReformatMode::passthrough) {
        BenchmarkItem item;
        item.mode = human.choices ? ItemMode::mcq : ItemMode::open_ended;
        item.item_id = human.item_id + ".r." + to_string(item.mode) + ".passthrough";
        item.chunk_id = human.item_id;
        item.context = human.context;
        item.question = human.question;
        if (human.choices) {
            for (int i = 0; i < 4; ++i) item.choices[kLetters[i]] = (*human.choices)[i];
            item.answer_letter = std::string(1, human.answer_letter.value_or('A'));
        }
        item.answer_text = human.answer_text;
        item.justification = "carried over verbatim from the source dataset";
        item.generating_model = "passthrough";
        auto reasons = validate_item(item);
        if (!reasons.empty()) throw SchemaViolation(reasons.front());
        return item;
    }

    ItemMode target = mode == ReformatMode::mcq ? ItemMode::mcq : ItemMode::open_ended;
    gateway::ChatRequest request;
    request.system_prompt = PromptTemplates::reformat_system(target);
    request.user_prompt = PromptTemplates::reformat_user(human, target);
    std::string call_tag = "reformat/" + to_string(target) + "/" + human.item_id;

    BenchmarkItem item = with_repairs(
        gateway, reformatter, request, call_tag,
        [&](const std::string& reply) { return parse_generated_item(reply, target); });

    item.item_id = human.item_id + ".r." + to_string(target) + "." + reformatter.name;
    item.chunk_id = human.item_id;
    item.context = human.context;
    item.generating_model = reformatter.name;

    std::string gold = normalize_answer(human.answer_text);
    if (target == ItemMode::mcq) {
        std::string marked = normalize_answer(item.answer_text);
        bool preserved;
        if (gold == "yes" || gold == "no" || gold == "maybe")
            preserved = contains_word(marked, gold);  // verdict expanded into a statement
        else
            preserved = marked == gold;
        if (!preserved) throw CorrectAnswerLost(human.item_id);
    } else {
        // The original answer is the reference by definition; the model only
        // rewrites the question.
        item.answer_text = human.answer_text;
    }

    auto reasons = validate_item(item);
    if (!reasons.empty()) throw SchemaViolation(reasons.front());
    return item;
}

namespace {

int chunk_ordinal_of(const std::string& chunk_id) {
    std::size_t hash = chunk_id.rfind('#');
    if (hash == std::string::npos) return 0;
    int value = 0;
    for (std::size_t i = hash + 1; i < chunk_id.size(); ++i) {
        char c = chunk_id[i];
        if (c < '0' || c > '9') return 0;
        value = value * 10 + (c - '0');
    }
    return value;
}

int topic_ordinal_of(const std::string& item_id) {
    // "<chunk>.t<k>.<mode>.<generator>"
    std::size_t p3 = item_id.rfind('.');
    std::size_t p2 = p3 == std::string::npos ? std::string::npos : item_id.rfind('.', p3 - 1);
    std::size_t p1 = p2 == std::string::npos ? std::string::npos : item_id.rfind('.', p2 - 1);
    if (p1 == std::string::npos) return 0;
    std::string slot = item_id.substr(p1 + 1, p2 - p1 - 1);
    if (slot.size() < 2 || slot[0] != 't') return 0;
    int value = 0;
    for (std::size_t i = 1; i < slot.size(); ++i) {
        if (slot[i] < '0' || slot[i] > '9') return 0;
        value = value * 10 + (slot[i] - '0');
    }
    return value;
}

}  // namespace

BuildReport build_benchmark(gateway::Gateway& gateway,
                            const std::vector<corpus::DocumentTree>& docs,
                            const corpus::ChunkPolicy& policy,
                            const std::vector<gateway::ModelEndpoint>& generators,
                            const BuildOptions& options) {
    if (docs.empty()) throw Error("build_benchmark: need at least one document");
    if (generators.empty()) throw Error("build_benchmark: need at least one generator");

    BuildReport report;
    Benchmark& benchmark = report.benchmark;
    benchmark.mode = options.mode;

    struct Keyed {
        std::size_t doc_index;
        int chunk_ordinal;
        int topic_ordinal;
        BenchmarkItem item;
    };
    std::vector<Keyed> collected;

    std::vector<std::pair<std::size_t, corpus::ContextChunk>> all_chunks;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        benchmark.source_doc_ids.push_back(docs[d].doc_id);
        auto chunks = corpus::chunk_document(docs[d], policy);
        auto screened = corpus::apply_deny_list(std::move(chunks), policy);
        for (const auto& excluded : screened.excluded)
            report.denied_sections.push_back(excluded.chunk_id);
        for (auto& chunk : screened.kept) all_chunks.emplace_back(d, std::move(chunk));
    }

    for (const auto& generator : generators) {
        benchmark.generating_models.push_back(generator.name);
        for (const auto& [doc_index, chunk] : all_chunks) {
            std::vector<Topic> topics;
            try {
                topics = extract_topics(gateway, generator, chunk, options.max_topics);
            } catch (const AuthFailure&) {
                throw;  // nothing else will succeed either
            } catch (const Error& failure) {
                report.dropped.push_back({chunk.chunk_id, "", generator.name, failure.what()});
                continue;
            }
            for (const auto& topic : topics) {
                try {
                    BenchmarkItem item = options.mode == ItemMode::mcq
                                             ? generate_mcq(gateway, generator, chunk, topic)
                                             : generate_open_ended(gateway, generator, chunk,
                                                                   topic);
                    collected.push_back({doc_index, chunk_ordinal_of(chunk.chunk_id),
                                         topic.ordinal, std::move(item)});
                } catch (const AuthFailure&) {
                    throw;
                } catch (const Error& failure) {
                    report.dropped.push_back(
                        {chunk.chunk_id, topic.text, generator.name, failure.what()});
                }
            }
        }
    }

    std::stable_sort(collected.begin(), collected.end(), [](const Keyed& a, const Keyed& b) {
        return std::tie(a.doc_index, a.chunk_ordinal, a.topic_ordinal,
                        a.item.generating_model) <
               std::tie(b.doc_index, b.chunk_ordinal, b.topic_ordinal,
                        b.item.generating_model);
    });
    for (auto& keyed : collected) benchmark.items.push_back(std::move(keyed.item));

    benchmark.dataset = options.dataset;
    if (benchmark.dataset.empty()) {
        for (const auto& doc_id : benchmark.source_doc_ids)
            benchmark.dataset += (benchmark.dataset.empty() ? "" : "+") + doc_id;
    }
    benchmark.benchmark_id = options.benchmark_id;
    if (benchmark.benchmark_id.empty()) {
        std::string ids;
        for (const auto& item : benchmark.items) ids += item.item_id + "\n";
        benchmark.benchmark_id =
            benchmark.dataset + "-" + to_string(options.mode) + "-" + sha256_hex(ids).substr(0, 12);
    }

    std::size_t attempted = benchmark.items.size() + report.dropped.size();
    report.partial = attempted > 0 && static_cast<double>(report.dropped.size()) /
                                              static_cast<double>(attempted) >
                                          options.drop_ceiling;
    return report;
}

void save_benchmark(const Benchmark& benchmark, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write benchmark file: " + path);
    for (const auto& item : benchmark.items) out << item.to_json().dump() << "\n";
}

Benchmark load_benchmark(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read benchmark file: " + path);
    Benchmark benchmark;
    std::set<std::string> ids;
    std::set<std::string> models;
    std::set<std::string> doc_ids;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw MalformedRecord(line_no, "", e.what());
        }
        BenchmarkItem item;
        try {
            item = BenchmarkItem::from_json(record);
        } catch (const SchemaViolation& violation) {
            throw MalformedRecord(line_no, "item", violation.reason);
        }
        if (!ids.insert(item.item_id).second) throw DuplicateItemId(item.item_id);
        if (first) {
            benchmark.mode = item.mode;
            first = false;
        } else if (item.mode != benchmark.mode) {
            throw MalformedRecord(line_no, "mode", "mixed item modes in one benchmark");
        }
        models.insert(item.generating_model);
        std::size_t hash = item.chunk_id.rfind('#');
        doc_ids.insert(hash == std::string::npos ? item.chunk_id : item.chunk_id.substr(0, hash));
        benchmark.items.push_back(std::move(item));
    }
    if (benchmark.items.empty()) throw Error("benchmark file has no items: " + path);
    benchmark.generating_models.assign(models.begin(), models.end());
    benchmark.source_doc_ids.assign(doc_ids.begin(), doc_ids.end());
    std::string id_concat;
    for (const auto& item : benchmark.items) id_concat += item.item_id + "\n";
    benchmark.benchmark_id = "loaded-" + sha256_hex(id_concat).substr(0, 12);
    return benchmark;
}

}  // namespace groundbench::genesis
