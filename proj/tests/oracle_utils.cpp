#include "oracle_utils.hpp"

#include <cctype>

namespace oracle {

std::string check_xml(const std::string& text) {
    std::vector<std::string> stack;
    std::string::size_type pos = 0;
    bool seen_root = false;
    while (pos < text.size()) {
        const auto open = text.find('<', pos);
        if (open == std::string::npos) break;
        const auto close = text.find('>', open);
        if (close == std::string::npos) return "unterminated tag";
        std::string tag = text.substr(open + 1, close - open - 1);
        pos = close + 1;
        if (tag.rfind("?", 0) == 0 || tag.rfind("!", 0) == 0) continue;

        // attribute quotes must balance
        int quotes = 0;
        for (char c : tag) quotes += (c == '"');
        if (quotes % 2 != 0) return "unbalanced attribute quotes in <" + tag;

        if (tag.rfind("/", 0) == 0) {
            const std::string name = tag.substr(1);
            if (stack.empty()) return "closing tag without opener: " + name;
            if (stack.back() != name) {
                return "mismatched closing tag: expected " + stack.back() +
                       ", got " + name;
            }
            stack.pop_back();
            continue;
        }
        const bool self_closing = !tag.empty() && tag.back() == '/';
        std::string name;
        for (char c : tag) {
            if (std::isspace(static_cast<unsigned char>(c)) || c == '/') break;
            name.push_back(c);
        }
        if (name.empty()) return "empty tag name";
        if (stack.empty()) {
            if (seen_root && !self_closing) return "multiple root elements";
            seen_root = true;
        }
        if (!self_closing) stack.push_back(name);
    }
    if (!stack.empty()) return "unclosed tag: " + stack.back();
    if (!seen_root) return "no root element";
    return "";
}

} // namespace oracle
