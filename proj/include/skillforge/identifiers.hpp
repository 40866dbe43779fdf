#pragma once

#include <string>
#include <string_view>

namespace skillforge {

/// Collapses free text into a lowerCamelCase token: alphanumeric runs are
/// joined, the first run starts lowercase, subsequent runs start uppercase.
/// "raw material" -> "rawMaterial", "Transport Request" -> "transportRequest".
/// A leading digit gets an underscore prefix; unusable input yields "".
std::string sanitize_camel(std::string_view text);

/// True for [A-Za-z_][A-Za-z0-9_]* (the identifier shape required of
/// skill interface names and emitted field/method names).
bool is_valid_identifier(std::string_view text);

/// True for the XML NCName subset we emit: [A-Za-z_][A-Za-z0-9_.-]*.
bool is_valid_ncname(std::string_view text);

} // namespace skillforge
