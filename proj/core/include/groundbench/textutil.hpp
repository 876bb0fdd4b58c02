#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace groundbench::text {

std::string trim(const std::string& text);

// lowercase + whitespace collapse, for case-insensitive comparisons
std::string fold(const std::string& text);

// fold + punctuation stripped, for answer-preservation checks
std::string normalize_answer(const std::string& text);

// word-boundary containment over normalize_answer-style strings
bool contains_word(const std::string& haystack, const std::string& word);

// Pulls a JSON value out of a model reply: fenced ``` block first, then the
// outermost brace/bracket span, then the raw text.  nullopt when nothing
// parses.
std::optional<nlohmann::json> extract_json_value(const std::string& reply);

}  // namespace groundbench::text
