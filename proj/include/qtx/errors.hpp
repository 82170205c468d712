#pragma once

#include <stdexcept>
#include <string>

namespace qtx {

struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

struct NoRootError : std::invalid_argument {
    explicit NoRootError(const std::string& what) : std::invalid_argument(what) {}
};

struct IncompatibleError : std::invalid_argument {
    explicit IncompatibleError(const std::string& what) : std::invalid_argument(what) {}
};

struct NotInjectiveError : std::invalid_argument {
    explicit NotInjectiveError(const std::string& what) : std::invalid_argument(what) {}
};

struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

struct NotCalibratedError : std::logic_error {
    explicit NotCalibratedError(const std::string& what) : std::logic_error(what) {}
};

// Breach of a structural guarantee (e.g. a differential whose ell-th power
// is nonzero after construction). Maps to exit code 3 in the CLI.
struct InvariantError : std::logic_error {
    explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace qtx
