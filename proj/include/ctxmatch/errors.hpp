#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ctxmatch {

// All hard errors carry a short machine-readable code plus a human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

} // namespace ctxmatch
