// errors.hpp: exception types shared by the library and the CLI

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cooptrap {

// Invalid user input (bad parameters, malformed config). CLI exit code 1.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what)
        : std::invalid_argument(what), issues_{what} {}

    explicit ConfigError(std::vector<std::string> issues)
        : std::invalid_argument(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& s : items) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

// Failed bracketing, pole on the grid, eigensolver breakdown. CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File system failures. CLI exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cooptrap
