#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace groundbench::corpus {

/// One heading-delimited slice of a markdown document. Level 0 is the
/// pseudo-node holding any preamble before the first heading.
struct HeadingNode {
    int level = 0;                 // 0 (preamble) or 1..6
    std::string heading;           // display text, empty for preamble
    std::string raw_heading_line;  // exact heading line, empty for preamble
    std::string body;              // exact bytes up to the next heading line
};

struct DocumentTree {
    std::string doc_id;
    std::string title;
    std::vector<HeadingNode> nodes;

    /// Concatenates heading lines and bodies; equals the (line-ending
    /// normalized, setext-rewritten) input byte for byte.
    std::string reconstruct() const;
};

struct ContextChunk {
    std::string chunk_id;                   // "doc_id#ordinal"
    std::vector<std::string> section_path;  // heading texts, root to section
    std::string text;
    std::size_t char_count = 0;
};

struct ChunkPolicy {
    std::set<int> split_levels{1, 2, 3};
    int min_chars = 200;
    int max_chars = 8000;
    bool merge_small = true;
    // Sections excluded from question generation, matched case-insensitively
    // against the last element of the section path.
    std::vector<std::string> deny_sections{"references", "acknowledgments",
                                           "acknowledgements", "bibliography"};
};

struct HumanItem {
    std::string item_id;
    std::string context;
    std::string question;
    std::string answer_text;
    std::optional<std::array<std::string, 4>> choices;  // A..D
    std::optional<char> answer_letter;                  // 'A'..'D'
};

enum class HumanDatasetFormat { json_lines };

/// CRLF/CR -> LF plus a setext-to-ATX rewrite pass; parse_markdown applies
/// this before scanning, exposed so callers can compare against reconstruct().
std::string normalize_markdown(std::string_view text);

/// Splits markdown into heading-delimited nodes. ATX headings outside fenced
/// code blocks delimit nodes; fenced content is never treated as a heading.
/// Throws EmptyDocument when the text is blank.
DocumentTree parse_markdown(std::string_view text, std::string doc_id = "doc");

std::vector<ContextChunk> chunk_document(const DocumentTree& doc, const ChunkPolicy& policy);

struct DenyListResult {
    std::vector<ContextChunk> kept;
    std::vector<ContextChunk> excluded;  // flagged, never silently dropped
};
DenyListResult apply_deny_list(std::vector<ContextChunk> chunks, const ChunkPolicy& policy);

std::vector<HumanItem> load_human_dataset(const std::filesystem::path& path,
                                          HumanDatasetFormat format = HumanDatasetFormat::json_lines);

inline int letter_index(char letter) { return letter - 'A'; }
inline char index_letter(int idx) { return static_cast<char>('A' + idx); }

}  // namespace groundbench::corpus
