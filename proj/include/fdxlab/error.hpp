#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fdxlab {

/// Base of every error thrown by the library. The CLI maps these to exit code 1.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A quantity that should be finite (an integral, a norm) is not.
class IntegrabilityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Iterative method hit its iteration cap.
class ConvergenceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Configuration problems. Carries every offending key, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& s : items) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> problems_;
};

} // namespace fdxlab
