#include "skillforge/identifiers.hpp"

#include <cctype>

namespace skillforge {

namespace {

bool is_alnum_ascii(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

} // namespace

std::string sanitize_camel(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool at_boundary = false;
    for (char c : text) {
        if (!is_alnum_ascii(c)) {
            // Non-ASCII bytes and punctuation act as word separators.
            if (!out.empty())
                at_boundary = true;
            continue;
        }
        if (out.empty()) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (at_boundary) {
            out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
            at_boundary = false;
        } else {
            out.push_back(c);
        }
    }
    if (!out.empty() && out.front() >= '0' && out.front() <= '9')
        out.insert(out.begin(), '_');
    return out;
}

bool is_valid_identifier(std::string_view text) {
    if (text.empty())
        return false;
    char first = text.front();
    if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z') || first == '_'))
        return false;
    for (char c : text.substr(1)) {
        if (!is_alnum_ascii(c) && c != '_')
            return false;
    }
    return true;
}

bool is_valid_ncname(std::string_view text) {
    if (text.empty())
        return false;
    char first = text.front();
    if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z') || first == '_'))
        return false;
    for (char c : text.substr(1)) {
        if (!is_alnum_ascii(c) && c != '_' && c != '-' && c != '.')
            return false;
    }
    return true;
}

} // namespace skillforge
