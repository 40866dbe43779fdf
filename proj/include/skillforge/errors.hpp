#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace skillforge {

/// Base class for all structured errors. `code()` is a stable,
/// machine-readable identifier; `what()` carries the human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace skillforge
