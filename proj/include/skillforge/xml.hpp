#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "skillforge/errors.hpp"

namespace skillforge::xml {

struct XmlError : Error {
    XmlError(int line, int column, const std::string& message)
        : Error("XmlError",
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line(line), column(column) {}
    int line;
    int column;
};

/// A parsed element. Names keep their prefix as written ("sf:skill");
/// local_name() strips it. Text is the concatenated character data of the
/// element itself (child text nodes joined, entity references resolved).
struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes; // document order
    std::vector<Element> children;
    std::string text;

    std::string local_name() const;
    const std::string* attribute(const std::string& attr_name) const;
    const Element* first_child(const std::string& local) const;
    std::vector<const Element*> children_named(const std::string& local) const;
};

/// Parses a standalone XML document (prolog, comments and PIs skipped,
/// CDATA and the five predefined plus numeric entities supported). Throws
/// XmlError with line/column on malformed input; never crashes on arbitrary
/// bytes.
Element parse_document(const std::string& text);

std::string escape_text(const std::string& text);
std::string escape_attribute(const std::string& text);

/// Serializes with 2-space indentation and a trailing newline. Elements that
/// carry text render inline; attribute order is preserved.
std::string write_document(const Element& root);

} // namespace skillforge::xml
