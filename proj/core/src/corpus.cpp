#include "groundbench/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "groundbench/errors.hpp"

namespace groundbench::corpus {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

struct FenceState {
    bool open = false;
    char marker = '`';
    std::size_t length = 0;
};

// Fence open/close per CommonMark basics: 3+ backticks or tildes with up to
// three leading spaces; the closing fence uses the same marker, at least as
// long, with nothing but whitespace after it.
bool is_fence_line(std::string_view line, char* marker, std::size_t* length, bool* has_info) {
    std::size_t i = 0;
    while (i < line.size() && i < 3 && line[i] == ' ') ++i;
    if (i >= line.size() || (line[i] != '`' && line[i] != '~')) return false;
    char c = line[i];
    std::size_t n = 0;
    while (i + n < line.size() && line[i + n] == c) ++n;
    if (n < 3) return false;
    std::string_view rest = line.substr(i + n);
    *marker = c;
    *length = n;
    *has_info = !trim(rest).empty();
    return true;
}

void update_fence(std::string_view line, FenceState* fence) {
    char marker;
    std::size_t length;
    bool has_info;
    if (!is_fence_line(line, &marker, &length, &has_info)) return;
    if (!fence->open) {
        fence->open = true;
        fence->marker = marker;
        fence->length = length;
    } else if (marker == fence->marker && length >= fence->length && !has_info) {
        fence->open = false;
    }
}

// ATX heading: up to three leading spaces, 1-6 '#', then space or EOL.
bool parse_atx(std::string_view line, int* level, std::string* text) {
    std::size_t i = 0;
    while (i < line.size() && i < 3 && line[i] == ' ') ++i;
    std::size_t hashes = 0;
    while (i + hashes < line.size() && line[i + hashes] == '#') ++hashes;
    if (hashes < 1 || hashes > 6) return false;
    std::size_t after = i + hashes;
    if (after < line.size() && line[after] != ' ' && line[after] != '\t') return false;
    std::string t = trim(line.substr(after));
    // strip a closing hash run ("## title ##")
    std::size_t end = t.size();
    while (end > 0 && t[end - 1] == '#') --end;
    if (end < t.size() && (end == 0 || t[end - 1] == ' ' || t[end - 1] == '\t')) {
        t = trim(std::string_view(t).substr(0, end));
    }
    *level = static_cast<int>(hashes);
    *text = t;
    return true;
}

bool is_setext_underline(std::string_view line, int* level) {
    std::size_t i = 0;
    while (i < line.size() && i < 3 && line[i] == ' ') ++i;
    if (i >= line.size()) return false;
    char c = line[i];
    if (c != '=' && c != '-') return false;
    std::size_t n = 0;
    while (i + n < line.size() && line[i + n] == c) ++n;
    if (!trim(line.substr(i + n)).empty()) return false;
    *level = (c == '=') ? 1 : 2;
    return true;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

}  // namespace

std::string normalize_markdown(std::string_view text) {
    std::string lf;
    lf.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            lf.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            lf.push_back(text[i]);
        }
    }

    // Setext -> ATX rewrite. An underline counts only when the previous line
    // is a plain non-blank paragraph line outside any fence.
    std::vector<std::string> lines = split_lines(lf);
    std::vector<std::string> out;
    out.reserve(lines.size());
    FenceState fence;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        bool was_open = fence.open;
        update_fence(line, &fence);
        if (was_open || fence.open != was_open) {  // inside, opening, or closing a fence
            out.push_back(line);
            continue;
        }
        int level;
        std::string text_unused;
        int setext_level;
        if (!out.empty() && is_setext_underline(line, &setext_level)) {
            const std::string& prev = out.back();
            int prev_level;
            std::string prev_text;
            char m;
            std::size_t len;
            bool info;
            bool prev_heading = parse_atx(prev, &prev_level, &prev_text);
            bool prev_fence = is_fence_line(prev, &m, &len, &info);
            bool prev_setext_candidate = !trim(prev).empty() && !prev_heading && !prev_fence;
            // '-' underneath a list line stays a list/thematic-break, not a heading
            if (prev_setext_candidate && setext_level == 2) {
                std::string pt = trim(prev);
                if (pt.rfind("- ", 0) == 0 || pt.rfind("* ", 0) == 0 || pt.rfind("+ ", 0) == 0)
                    prev_setext_candidate = false;
            }
            if (prev_setext_candidate) {
                std::string heading(setext_level, '#');
                heading += ' ';
                heading += trim(prev);
                out.back() = heading;
                continue;  // drop the underline
            }
        }
        (void)level;
        out.push_back(line);
    }

    std::string joined;
    joined.reserve(lf.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        joined += out[i];
        if (i + 1 < out.size()) joined += '\n';
    }
    return joined;
}

std::string DocumentTree::reconstruct() const {
    std::string out;
    for (const auto& node : nodes) {
        out += node.raw_heading_line;
        out += node.body;
    }
    return out;
}

DocumentTree parse_markdown(std::string_view text, std::string doc_id) {
    if (trim(text).empty()) throw EmptyDocument();

    std::string normalized = normalize_markdown(text);

    DocumentTree doc;
    doc.doc_id = std::move(doc_id);

    // Locate heading-line start offsets outside fences.
    struct Heading {
        std::size_t line_start;
        std::size_t line_end;  // exclusive, without the newline
        int level;
        std::string text;
    };
    std::vector<Heading> headings;
    FenceState fence;
    std::size_t pos = 0;
    while (pos <= normalized.size()) {
        std::size_t nl = normalized.find('\n', pos);
        std::size_t line_end = (nl == std::string::npos) ? normalized.size() : nl;
        std::string_view line(normalized.data() + pos, line_end - pos);
        bool was_open = fence.open;
        update_fence(line, &fence);
        bool in_fence = was_open;  // a line opening a fence is itself fence syntax
        if (!in_fence && !(fence.open != was_open && fence.open)) {
            int level;
            std::string htext;
            if (parse_atx(line, &level, &htext)) {
                headings.push_back({pos, line_end, level, htext});
            }
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }

    std::size_t cursor = 0;
    if (headings.empty() || headings.front().line_start > 0) {
        std::size_t end = headings.empty() ? normalized.size() : headings.front().line_start;
        HeadingNode pre;
        pre.level = 0;
        pre.body = normalized.substr(0, end);
        doc.nodes.push_back(std::move(pre));
        cursor = end;
    }
    for (std::size_t h = 0; h < headings.size(); ++h) {
        const Heading& head = headings[h];
        std::size_t next = (h + 1 < headings.size()) ? headings[h + 1].line_start
                                                     : normalized.size();
        HeadingNode node;
        node.level = head.level;
        node.heading = head.text;
        node.raw_heading_line = normalized.substr(head.line_start, head.line_end - head.line_start);
        node.body = normalized.substr(head.line_end, next - head.line_end);
        doc.nodes.push_back(std::move(node));
        cursor = next;
    }
    (void)cursor;

    for (const auto& node : doc.nodes) {
        if (node.level == 1) {
            doc.title = node.heading;
            break;
        }
    }
    if (doc.title.empty()) doc.title = doc.doc_id;
    return doc;
}

namespace {

struct RawChunk {
    std::vector<std::string> section_path;
    std::string text;
};

std::vector<std::string> split_paragraphs(const std::string& text) {
    std::vector<std::string> paras;
    std::string current;
    std::istringstream in(text);
    std::string line;
    bool blank_run = false;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            blank_run = true;
            continue;
        }
        if (blank_run && !current.empty()) {
            paras.push_back(current);
            current.clear();
        }
        blank_run = false;
        if (!current.empty()) current += '\n';
        current += line;
    }
    if (!current.empty()) paras.push_back(current);
    return paras;
}

}  // namespace

std::vector<ContextChunk> chunk_document(const DocumentTree& doc, const ChunkPolicy& policy) {
    if (policy.split_levels.empty()) throw Error("chunk policy: split_levels must be non-empty");
    if (policy.min_chars >= policy.max_chars)
        throw Error("chunk policy: min_chars must be < max_chars");

    std::vector<RawChunk> runs;
    std::vector<std::pair<int, std::string>> heading_stack;  // (level, text)

    auto path_snapshot = [&heading_stack]() {
        std::vector<std::string> p;
        p.reserve(heading_stack.size());
        for (const auto& [lvl, txt] : heading_stack) p.push_back(txt);
        return p;
    };

    for (const auto& node : doc.nodes) {
        if (node.level > 0) {
            while (!heading_stack.empty() && heading_stack.back().first >= node.level)
                heading_stack.pop_back();
            heading_stack.emplace_back(node.level, node.heading);
        }
        bool starts_chunk = runs.empty() ||
                            (node.level > 0 && policy.split_levels.count(node.level) > 0);
        if (starts_chunk) {
            RawChunk rc;
            rc.section_path = path_snapshot();
            runs.push_back(std::move(rc));
        }
        std::string body = trim(node.body);
        if (!body.empty()) {
            RawChunk& rc = runs.back();
            if (!rc.text.empty()) rc.text += "\n\n";
            rc.text += body;
        }
    }

    // drop runs with no body text at all
    std::erase_if(runs, [](const RawChunk& rc) { return rc.text.empty(); });

    if (policy.merge_small) {
        bool changed = true;
        while (changed && runs.size() > 1) {
            changed = false;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (static_cast<int>(runs[i].text.size()) >= policy.min_chars) continue;
                if (i + 1 < runs.size()) {  // merge forward
                    runs[i + 1].text = runs[i].text + "\n\n" + runs[i + 1].text;
                    if (!runs[i].section_path.empty())
                        runs[i + 1].section_path = runs[i].section_path;
                    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(i));
                } else {  // last chunk merges backward
                    runs[i - 1].text += "\n\n" + runs[i].text;
                    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(i));
                }
                changed = true;
                break;
            }
        }
    }

    // split oversize chunks at blank-line paragraph boundaries
    std::vector<RawChunk> sized;
    for (auto& rc : runs) {
        if (static_cast<int>(rc.text.size()) <= policy.max_chars) {
            sized.push_back(std::move(rc));
            continue;
        }
        std::vector<std::string> paras = split_paragraphs(rc.text);
        std::string piece;
        for (const auto& para : paras) {
            std::size_t extra = piece.empty() ? para.size() : para.size() + 2;
            if (!piece.empty() &&
                piece.size() + extra > static_cast<std::size_t>(policy.max_chars)) {
                sized.push_back({rc.section_path, piece});
                piece.clear();
            }
            if (!piece.empty()) piece += "\n\n";
            piece += para;
        }
        if (!piece.empty()) sized.push_back({rc.section_path, std::move(piece)});
    }

    std::vector<ContextChunk> chunks;
    chunks.reserve(sized.size());
    for (std::size_t i = 0; i < sized.size(); ++i) {
        ContextChunk c;
        c.chunk_id = doc.doc_id + "#" + std::to_string(i);
        c.section_path = std::move(sized[i].section_path);
        c.text = std::move(sized[i].text);
        c.char_count = c.text.size();
        chunks.push_back(std::move(c));
    }
    return chunks;
}

DenyListResult apply_deny_list(std::vector<ContextChunk> chunks, const ChunkPolicy& policy) {
    DenyListResult result;
    for (auto& chunk : chunks) {
        bool denied = false;
        if (!chunk.section_path.empty()) {
            std::string last = to_lower(trim(chunk.section_path.back()));
            for (const auto& deny : policy.deny_sections) {
                if (last == to_lower(deny)) {
                    denied = true;
                    break;
                }
            }
        }
        (denied ? result.excluded : result.kept).push_back(std::move(chunk));
    }
    return result;
}

std::vector<HumanItem> load_human_dataset(const std::filesystem::path& path,
                                          HumanDatasetFormat format) {
    (void)format;  // json_lines is the only format
    std::ifstream in(path);
    if (!in) throw Error("cannot open human dataset: " + path.string());

    std::vector<HumanItem> items;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    std::string stem = path.stem().string();

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;

        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw MalformedRecord(line_no, "<json>", e.what());
        }
        if (!rec.is_object()) throw MalformedRecord(line_no, "<json>", "record is not an object");

        HumanItem item;
        if (rec.contains("id")) {
            if (!rec["id"].is_string()) throw MalformedRecord(line_no, "id", "must be a string");
            item.item_id = rec["id"].get<std::string>();
        } else {
            item.item_id = stem + "#" + std::to_string(line_no);
        }
        if (seen_ids.count(item.item_id)) throw DuplicateItemId(item.item_id);
        seen_ids.insert(item.item_id);

        auto require_string = [&](const char* key) -> std::string {
            if (!rec.contains(key)) throw MalformedRecord(line_no, key, "missing");
            if (!rec[key].is_string()) throw MalformedRecord(line_no, key, "must be a string");
            std::string v = rec[key].get<std::string>();
            if (trim(v).empty()) throw MalformedRecord(line_no, key, "must be non-empty");
            return v;
        };
        item.context = require_string("context");
        item.question = require_string("question");

        if (!rec.contains("answer")) throw MalformedRecord(line_no, "answer", "missing");

        if (rec.contains("choices") && !rec["choices"].is_null()) {
            const json& ch = rec["choices"];
            if (!ch.is_object()) throw MalformedRecord(line_no, "choices", "must be an object");
            if (ch.size() != 4)
                throw MalformedRecord(line_no, "choices",
                                      "expected exactly 4 entries, got " + std::to_string(ch.size()));
            std::array<std::string, 4> options;
            for (char l = 'A'; l <= 'D'; ++l) {
                std::string key(1, l);
                if (!ch.contains(key)) throw MalformedRecord(line_no, "choices", "missing key " + key);
                if (!ch[key].is_string())
                    throw MalformedRecord(line_no, "choices", "value for " + key + " must be a string");
                options[letter_index(l)] = ch[key].get<std::string>();
            }
            if (!rec["answer"].is_string())
                throw MalformedRecord(line_no, "answer", "must be a letter A-D");
            std::string ans = trim(rec["answer"].get<std::string>());
            if (ans.size() != 1 || ans[0] < 'A' || ans[0] > 'D')
                throw MalformedRecord(line_no, "answer", "must be a letter A-D, got '" + ans + "'");
            char letter = ans[0];
            if (trim(options[letter_index(letter)]).empty())
                throw MalformedRecord(line_no, "choices",
                                      std::string("option ") + letter + " (the answer) is empty");
            item.choices = options;
            item.answer_letter = letter;
            item.answer_text = options[letter_index(letter)];
        } else {
            if (!rec["answer"].is_string())
                throw MalformedRecord(line_no, "answer", "must be a string");
            item.answer_text = rec["answer"].get<std::string>();
            if (trim(item.answer_text).empty())
                throw MalformedRecord(line_no, "answer", "must be non-empty");
        }
        items.push_back(std::move(item));
    }
    return items;
}

}  // namespace groundbench::corpus
