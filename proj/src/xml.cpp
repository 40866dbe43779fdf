#include "skillforge/xml.hpp"

#include <cctype>
#include <sstream>

namespace skillforge::xml {

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Element parse() {
        skip_prolog();
        Element root = parse_element();
        skip_misc();
        if (pos_ != text_.size())
            fail("content after the document element");
        return root;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& message) const {
        int line = 1, column = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw XmlError(line, column, message);
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }

    bool starts_with(const char* s) const {
        return text_.compare(pos_, std::char_traits<char>::length(s), s) == 0;
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    void expect(char c) {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_until(const char* terminator) {
        std::size_t found = text_.find(terminator, pos_);
        if (found == std::string::npos)
            fail(std::string("unterminated construct, expected \"") + terminator + "\"");
        pos_ = found + std::char_traits<char>::length(terminator);
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                pos_ += 4;
                skip_until("-->");
            } else if (starts_with("<?")) {
                pos_ += 2;
                skip_until("?>");
            } else {
                return;
            }
        }
    }

    void skip_prolog() {
        skip_misc();
        if (starts_with("<!DOCTYPE")) {
            skip_until(">");
            skip_misc();
        }
    }

    static bool is_name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
    }

    std::string parse_name() {
        std::size_t start = pos_;
        while (!eof() && is_name_char(text_[pos_]))
            ++pos_;
        if (pos_ == start)
            fail("expected a name");
        return text_.substr(start, pos_ - start);
    }

    std::string parse_entity() {
        // pos_ points just past '&'
        std::size_t semi = text_.find(';', pos_);
        if (semi == std::string::npos || semi - pos_ > 10)
            fail("unterminated entity reference");
        std::string entity = text_.substr(pos_, semi - pos_);
        pos_ = semi + 1;
        if (entity == "amp") return "&";
        if (entity == "lt") return "<";
        if (entity == "gt") return ">";
        if (entity == "quot") return "\"";
        if (entity == "apos") return "'";
        if (!entity.empty() && entity[0] == '#') {
            try {
                long code = entity[1] == 'x' || entity[1] == 'X'
                                ? std::stol(entity.substr(2), nullptr, 16)
                                : std::stol(entity.substr(1));
                if (code <= 0 || code > 0x10FFFF)
                    fail("character reference out of range");
                // Encode as UTF-8.
                std::string out;
                unsigned long cp = static_cast<unsigned long>(code);
                if (cp < 0x80) {
                    out.push_back(static_cast<char>(cp));
                } else if (cp < 0x800) {
                    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else if (cp < 0x10000) {
                    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else {
                    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                }
                return out;
            } catch (const std::exception&) {
                fail("malformed character reference");
            }
        }
        fail("unknown entity \"&" + entity + ";\"");
    }

    std::string parse_attribute_value() {
        char quote = peek();
        if (quote != '"' && quote != '\'')
            fail("expected a quoted attribute value");
        ++pos_;
        std::string value;
        while (!eof() && text_[pos_] != quote) {
            if (text_[pos_] == '<')
                fail("'<' is not allowed in attribute values");
            if (text_[pos_] == '&') {
                ++pos_;
                value += parse_entity();
            } else {
                value.push_back(text_[pos_++]);
            }
        }
        if (eof())
            fail("unterminated attribute value");
        ++pos_; // closing quote
        return value;
    }

    Element parse_element() {
        expect('<');
        Element element;
        element.name = parse_name();
        for (;;) {
            skip_ws();
            if (peek() == '/') {
                ++pos_;
                expect('>');
                return element;
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string attr = parse_name();
            skip_ws();
            expect('=');
            skip_ws();
            element.attributes.emplace_back(attr, parse_attribute_value());
        }
        // content
        for (;;) {
            if (eof())
                fail("unterminated element <" + element.name + ">");
            if (starts_with("</")) {
                pos_ += 2;
                std::string closing = parse_name();
                if (closing != element.name)
                    fail("mismatched closing tag </" + closing + ">, expected </" + element.name + ">");
                skip_ws();
                expect('>');
                return element;
            }
            if (starts_with("<!--")) {
                pos_ += 4;
                skip_until("-->");
                continue;
            }
            if (starts_with("<![CDATA[")) {
                pos_ += 9;
                std::size_t end = text_.find("]]>", pos_);
                if (end == std::string::npos)
                    fail("unterminated CDATA section");
                element.text += text_.substr(pos_, end - pos_);
                pos_ = end + 3;
                continue;
            }
            if (starts_with("<?")) {
                pos_ += 2;
                skip_until("?>");
                continue;
            }
            if (peek() == '<') {
                element.children.push_back(parse_element());
                continue;
            }
            if (peek() == '&') {
                ++pos_;
                element.text += parse_entity();
                continue;
            }
            element.text.push_back(text_[pos_++]);
        }
    }
};

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin])))
        ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1])))
        --end;
    return s.substr(begin, end - begin);
}

void write_element(std::ostringstream& out, const Element& element, int depth) {
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out << indent << '<' << element.name;
    for (const auto& [key, value] : element.attributes)
        out << ' ' << key << "=\"" << escape_attribute(value) << '"';
    if (element.children.empty() && element.text.empty()) {
        out << "/>\n";
        return;
    }
    out << '>';
    if (element.children.empty()) {
        out << escape_text(element.text) << "</" << element.name << ">\n";
        return;
    }
    out << '\n';
    for (const auto& child : element.children)
        write_element(out, child, depth + 1);
    out << indent << "</" << element.name << ">\n";
}

} // namespace

std::string Element::local_name() const {
    auto colon = name.find(':');
    return colon == std::string::npos ? name : name.substr(colon + 1);
}

const std::string* Element::attribute(const std::string& attr_name) const {
    for (const auto& [key, value] : attributes)
        if (key == attr_name)
            return &value;
    return nullptr;
}

const Element* Element::first_child(const std::string& local) const {
    for (const auto& child : children)
        if (child.local_name() == local)
            return &child;
    return nullptr;
}

std::vector<const Element*> Element::children_named(const std::string& local) const {
    std::vector<const Element*> out;
    for (const auto& child : children)
        if (child.local_name() == local)
            out.push_back(&child);
    return out;
}

Element parse_document(const std::string& text) {
    Parser parser(text);
    Element root = parser.parse();
    // Whitespace around text content is formatting, not data.
    struct Normalizer {
        static void run(Element& e) {
            e.text = trim(e.text);
            for (auto& c : e.children)
                run(c);
        }
    };
    Normalizer::run(root);
    return root;
}

std::string escape_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attribute(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\n': out += "&#10;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string write_document(const Element& root) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_element(out, root, 0);
    return out.str();
}

} // namespace skillforge::xml
