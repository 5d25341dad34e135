#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aprifire {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An attribute/value pair that fails the attribute's syntax rules.
class InvalidItemError : public Error {
public:
    explicit InvalidItemError(const std::string& what) : Error(what) {}
};

// Malformed input line or field. Carries the 1-based line and column of the
// offending token so callers can point at the input.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& reason)
        : Error("parse error at line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + reason),
          line_(line),
          column_(column),
          reason_(reason) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& reason() const { return reason_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string reason_;
};

// Fractional support threshold applied to an empty database.
class EmptyDatabaseError : public Error {
public:
    explicit EmptyDatabaseError(const std::string& what) : Error(what) {}
};

// Candidate join invoked on itemsets of differing sizes.
class MixedSizesError : public Error {
public:
    explicit MixedSizesError(const std::string& what) : Error(what) {}
};

// Rule derivation needed the support of an antecedent that the frequent set
// does not contain.
class MissingSubsetSupportError : public Error {
public:
    explicit MissingSubsetSupportError(const std::string& what) : Error(what) {}
};

// Confidence requested with an antecedent support of zero.
class ZeroAntecedentError : public Error {
public:
    explicit ZeroAntecedentError(const std::string& what) : Error(what) {}
};

// Firewall mapping asked for an antecedent with no mappable match field.
class UnmappableAntecedentError : public Error {
public:
    explicit UnmappableAntecedentError(const std::string& what) : Error(what) {}
};

// Brute-force oracle asked to enumerate more distinct items than its bound.
class TooManyItemsError : public Error {
public:
    explicit TooManyItemsError(const std::string& what) : Error(what) {}
};

// Bad pipeline configuration (flag values, unknown formats).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace aprifire
