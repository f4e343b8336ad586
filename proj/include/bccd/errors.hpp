#pragma once

#include <stdexcept>
#include <string>

namespace bccd {

// Malformed call: bad node ids, mismatched sizes, duplicate variables.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A structure exceeds what an exhaustive routine is allowed to handle.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Bad external input (CSV, graph text, manifests, cache files).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// A cache file was written by an incompatible version.
class CacheVersionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An internal consistency check failed; indicates a bug, not bad input.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace bccd
