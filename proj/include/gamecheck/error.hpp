#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gamecheck {

// Base of every error raised by the toolkit. `code()` is a stable short name
// (e.g. "MalformedExpression") used by the CLI and by tests.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// 1-based source location; zero means unknown.
struct SourceLocation {
  std::size_t line = 0;
  std::size_t column = 0;
};

std::string format_location(const SourceLocation& loc);

// Errors that belong to an input document (YAML spec, reduction, property file).
class InputError : public Error {
 public:
  InputError(std::string code, const std::string& message, SourceLocation loc = {})
      : Error(std::move(code), loc.line ? format_location(loc) + ": " + message : message),
        location_(loc) {}
  const SourceLocation& location() const noexcept { return location_; }

 private:
  SourceLocation location_;
};

struct ParseError : InputError {
  explicit ParseError(const std::string& m, SourceLocation loc = {}) : InputError("ParseError", m, loc) {}
};
struct UnknownKey : InputError {
  explicit UnknownKey(const std::string& m, SourceLocation loc = {}) : InputError("UnknownKey", m, loc) {}
};
struct DuplicateName : InputError {
  explicit DuplicateName(const std::string& m, SourceLocation loc = {}) : InputError("DuplicateName", m, loc) {}
};
struct UnknownName : InputError {
  explicit UnknownName(const std::string& m, SourceLocation loc = {}) : InputError("UnknownName", m, loc) {}
};

// Expression text rejected by the grammar or the type rules. `offset` is the
// 0-based character offset inside the expression string.
class MalformedExpression : public InputError {
 public:
  MalformedExpression(const std::string& m, std::size_t offset, SourceLocation loc = {})
      : InputError("MalformedExpression", m + " (at offset " + std::to_string(offset) + ")", loc),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

struct MalformedFormula : InputError {
  MalformedFormula(const std::string& m, std::size_t offset)
      : InputError("MalformedFormula", m + " (at offset " + std::to_string(offset) + ")") {}
};
struct UnknownProposition : InputError {
  explicit UnknownProposition(const std::string& name)
      : InputError("UnknownProposition", "unknown proposition '" + name + "'") {}
};

// Evaluation errors.
struct UnboundName : Error {
  explicit UnboundName(const std::string& name) : Error("UnboundName", "unbound name '" + name + "'") {}
};
struct DivisionByZero : Error {
  DivisionByZero() : Error("DivisionByZero", "division by zero") {}
};
struct ArithmeticOverflow : Error {
  ArithmeticOverflow() : Error("ArithmeticOverflow", "64-bit integer overflow") {}
};

struct DomainTooLarge : Error {
  explicit DomainTooLarge(const std::string& m) : Error("DomainTooLarge", m) {}
};

// Step-semantics errors. They are unreachable for specs that pass exhaustive
// validation and are kept as runtime guards.
struct RangeViolation : Error {
  explicit RangeViolation(const std::string& m) : Error("RangeViolation", m) {}
};
struct ActionConflict : Error {
  explicit ActionConflict(const std::string& m) : Error("ActionConflict", m) {}
};
struct CollisionConflict : Error {
  explicit CollisionConflict(const std::string& m) : Error("CollisionConflict", m) {}
};

class StateCapExceeded : public Error {
 public:
  StateCapExceeded(std::uint64_t cap, std::uint64_t reachable, std::uint64_t frontier)
      : Error("StateCapExceeded",
              "state cap " + std::to_string(cap) + " exceeded: " + std::to_string(reachable) +
                  " states reached, frontier of " + std::to_string(frontier)),
        cap_(cap), reachable_(reachable), frontier_(frontier) {}
  std::uint64_t cap() const noexcept { return cap_; }
  std::uint64_t reachable() const noexcept { return reachable_; }
  std::uint64_t frontier() const noexcept { return frontier_; }

 private:
  std::uint64_t cap_, reachable_, frontier_;
};

struct OracleScaleExceeded : Error {
  explicit OracleScaleExceeded(std::size_t n)
      : Error("OracleScaleExceeded", "naive checker limited to 2000 states, graph has " + std::to_string(n)) {}
};

// Template pipeline.
struct UnbalancedTagDelimiter : Error {
  explicit UnbalancedTagDelimiter(std::size_t offset)
      : Error("UnbalancedTagDelimiter", "unmatched '@' at offset " + std::to_string(offset)) {}
};
struct InvalidTagIdentifier : Error {
  InvalidTagIdentifier(const std::string& text, std::size_t offset)
      : Error("InvalidTagIdentifier", "invalid tag '@" + text + "@' at offset " + std::to_string(offset)) {}
};
class UnresolvedTag : public Error {
 public:
  explicit UnresolvedTag(std::vector<std::string> tags);
  const std::vector<std::string>& tags() const noexcept { return tags_; }

 private:
  std::vector<std::string> tags_;
};
struct NameCollision : Error {
  explicit NameCollision(const std::string& tag)
      : Error("NameCollision", "generated tag '" + tag + "' produced by two symbols") {}
};
struct UnsupportedConstruct : Error {
  explicit UnsupportedConstruct(const std::string& m) : Error("UnsupportedConstruct", m) {}
};

// Reduction.
struct FrozenOutOfDomain : Error {
  explicit FrozenOutOfDomain(const std::string& m) : Error("FrozenOutOfDomain", m) {}
};
struct EmptyActorActions : Error {
  explicit EmptyActorActions(const std::string& actor)
      : Error("EmptyActorActions", "actor '" + actor + "' is left without actions") {}
};

}  // namespace gamecheck
