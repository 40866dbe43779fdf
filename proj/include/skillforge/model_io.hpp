#pragma once

#include <string>
#include <vector>

#include "skillforge/errors.hpp"
#include "skillforge/model.hpp"

namespace skillforge::io {

struct ParseDiagnostic {
    std::string path; // slash-separated location into the document
    std::string message;

    bool operator==(const ParseDiagnostic&) const = default;
};

/// Malformed document text; line/column point at the first offending byte.
struct SyntaxError : Error {
    SyntaxError(int line, int column, const std::string& message)
        : Error("SyntaxError",
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line(line), column(column) {}
    int line;
    int column;
};

/// Well-formed JSON that does not match the .sgm.json schema.
struct SchemaError : Error {
    explicit SchemaError(std::vector<ParseDiagnostic> diagnostics);
    std::vector<ParseDiagnostic> diagnostics;
};

struct VersionError : Error {
    explicit VersionError(const std::string& version)
        : Error("VersionError", "unknown formatVersion \"" + version + "\"") {}
};

/// Parses the canonical `.sgm.json` model format (schema v1.0). Unknown
/// fields and duplicate names are rejected with SchemaError diagnostics;
/// semantic cross-references are left to validate_model.
model::SystemGroupModel parse_model(const std::string& text);

/// Canonical form: keys sorted lexicographically, arrays in declaration
/// order, 2-space indentation, trailing newline. parse_model is a left
/// inverse, and serialize ∘ parse is a fixpoint on canonical bytes.
std::string serialize_model(const model::SystemGroupModel& model);

} // namespace skillforge::io
