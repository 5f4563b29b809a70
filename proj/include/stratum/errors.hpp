#pragma once
// Error taxonomy. Every throwing path in the engine uses one of these; the
// CLI maps Error -> exit 1 and usage problems -> exit 2.

#include <stdexcept>
#include <string>

namespace stratum {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad argument or precondition violation (empty statement, bad window, ...).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Referenced id does not exist.
class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error(what) {}
};

// Operation would create a cycle in a supersession graph.
class CycleError : public Error {
public:
    explicit CycleError(const std::string& what) : Error(what) {}
};

// A consumer hook failed or violated its contract. Store state is never
// left partially mutated when one of these is thrown.
class HookError : public Error {
public:
    explicit HookError(const std::string& what) : Error(what) {}
};

// Log/snapshot corruption, unwritable files, version mismatch.
class StorageError : public Error {
public:
    explicit StorageError(const std::string& what) : Error(what) {}
};

// Malformed config file or out-of-range parameter.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace stratum
