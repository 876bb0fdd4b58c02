#include "groundbench/textutil.hpp"

#include <cctype>

namespace groundbench::text {

using nlohmann::json;

std::string trim(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    std::size_t last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::string fold(const std::string& text) {
    std::string out;
    bool pending = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::string normalize_answer(const std::string& text) {
    std::string out;
    bool pending = false;
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isspace(u) || std::ispunct(u)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(static_cast<char>(std::tolower(u)));
    }
    return out;
}

bool contains_word(const std::string& haystack, const std::string& word) {
    if (word.empty()) return false;
    std::size_t pos = 0;
    while ((pos = haystack.find(word, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || haystack[pos - 1] == ' ';
        std::size_t end = pos + word.size();
        bool right_ok = end == haystack.size() || haystack[end] == ' ';
        if (left_ok && right_ok) return true;
        pos += 1;
    }
    return false;
}

std::optional<json> extract_json_value(const std::string& reply) {
    std::size_t fence = reply.find("```");
    if (fence != std::string::npos) {
        std::size_t content = reply.find('\n', fence);
        if (content != std::string::npos) {
            std::size_t close = reply.find("```", content);
            if (close != std::string::npos) {
                try {
                    return json::parse(reply.substr(content + 1, close - content - 1));
                } catch (const json::exception&) {
                }
            }
        }
    }
    std::size_t first_obj = reply.find('{');
    std::size_t first_arr = reply.find('[');
    std::size_t first = std::min(first_obj, first_arr);
    if (first != std::string::npos) {
        char closer = reply[first] == '{' ? '}' : ']';
        std::size_t last = reply.rfind(closer);
        if (last != std::string::npos && last > first) {
            try {
                return json::parse(reply.substr(first, last - first + 1));
            } catch (const json::exception&) {
            }
        }
    }
    try {
        return json::parse(reply);
    } catch (const json::exception&) {
    }
    return std::nullopt;
}

}  // namespace groundbench::text
