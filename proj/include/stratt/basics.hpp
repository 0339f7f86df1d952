#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratt {

// Stratification levels are naturals; displacement is addition.
using Level = std::uint32_t;

// Source position, 1-based. file is an index into a file-name table owned by
// whoever produced the diagnostics (the driver); 0 means "no file".
struct Span {
  std::uint32_t file = 0;
  std::uint32_t line = 0;
  std::uint32_t col = 0;

  bool valid() const { return line != 0; }
};

// A level expression: either a concrete natural or a metavariable plus a
// non-negative offset. Frozen signature entries only contain concrete ones.
struct LevelExpr {
  static constexpr std::uint32_t kNoMeta = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t meta = kNoMeta;
  Level offset = 0;

  constexpr LevelExpr() = default;
  constexpr LevelExpr(Level v) : meta(kNoMeta), offset(v) {}  // NOLINT: implicit by design

  static constexpr LevelExpr metavar(std::uint32_t id, Level off = 0) {
    LevelExpr e;
    e.meta = id;
    e.offset = off;
    return e;
  }

  constexpr bool concrete() const { return meta == kNoMeta; }
  constexpr Level value() const { return offset; }  // only meaningful when concrete

  friend constexpr bool operator==(const LevelExpr& a, const LevelExpr& b) {
    return a.meta == b.meta && a.offset == b.offset;
  }
  friend constexpr bool operator!=(const LevelExpr& a, const LevelExpr& b) { return !(a == b); }

  LevelExpr plus(Level n) const {
    LevelExpr e = *this;
    e.offset += n;
    return e;
  }
};

// a shifted by b, where at most one side may mention a metavariable.
inline LevelExpr shiftLevel(const LevelExpr& a, const LevelExpr& b) {
  if (b.concrete()) return a.plus(b.offset);
  if (!a.concrete()) throw std::logic_error("shiftLevel: two metavariables in one level");
  return LevelExpr::metavar(b.meta, a.offset + b.offset);
}

inline std::string showLevelExpr(const LevelExpr& e) {
  if (e.concrete()) return std::to_string(e.offset);
  std::string s = "?" + std::to_string(e.meta);
  if (e.offset != 0) s += "+" + std::to_string(e.offset);
  return s;
}

// Provenance of a level constraint: the typing rule that emitted it and the
// source position it blames.
struct ConstraintNote {
  const char* rule = "";
  Span span{};
};

struct Constraint {
  enum class Kind { LE, LT, EQ };
  Kind kind = Kind::LE;
  LevelExpr lhs;
  LevelExpr rhs;
  ConstraintNote note;
};

inline Constraint leq(LevelExpr a, LevelExpr b, ConstraintNote n) {
  return Constraint{Constraint::Kind::LE, a, b, n};
}
inline Constraint lt(LevelExpr a, LevelExpr b, ConstraintNote n) {
  return Constraint{Constraint::Kind::LT, a, b, n};
}
inline Constraint eqc(LevelExpr a, LevelExpr b, ConstraintNote n) {
  return Constraint{Constraint::Kind::EQ, a, b, n};
}

enum class ErrorCode {
  Parse,
  Unbound,
  Mismatch,
  LevelUnsat,
  NotFunction,
  CannotInfer,
  NotData,
  NonExhaustive,
  CtorArity,
  CtorResult,
  Unify,
  Stuck,
  Fuel,
};

inline const char* errorCodeName(ErrorCode c) {
  switch (c) {
    case ErrorCode::Parse: return "E-PARSE";
    case ErrorCode::Unbound: return "E-UNBOUND";
    case ErrorCode::Mismatch: return "E-MISMATCH";
    case ErrorCode::LevelUnsat: return "E-LEVEL-UNSAT";
    case ErrorCode::NotFunction: return "E-NOT-FUNCTION";
    case ErrorCode::CannotInfer: return "E-CANNOT-INFER";
    case ErrorCode::NotData: return "E-NOT-DATA";
    case ErrorCode::NonExhaustive: return "E-NONEXHAUSTIVE";
    case ErrorCode::CtorArity: return "E-CTOR-ARITY";
    case ErrorCode::CtorResult: return "E-CTOR-RESULT";
    case ErrorCode::Unify: return "E-UNIFY";
    case ErrorCode::Stuck: return "E-STUCK";
    case ErrorCode::Fuel: return "E-FUEL";
  }
  return "E-UNKNOWN";
}

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  ErrorCode code = ErrorCode::Mismatch;
  Span span{};
  std::string message;
  std::vector<std::string> provenance;  // rendered constraint notes, outermost first
  std::string unit;                     // the declaration being checked, when known
};

// Thrown by checking/evaluation; checkProgram converts these into Diagnostics.
struct CheckError : std::runtime_error {
  Diagnostic diag;
  explicit CheckError(Diagnostic d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

[[noreturn]] inline void fail(ErrorCode code, Span span, std::string msg,
                              std::vector<std::string> provenance = {}) {
  Diagnostic d;
  d.code = code;
  d.span = span;
  d.message = std::move(msg);
  d.provenance = std::move(provenance);
  throw CheckError(std::move(d));
}

// Shared step budget for reduction; general recursion is unchecked, so every
// evaluation is bounded.
struct Fuel {
  std::uint64_t remaining = 100000;
  Span blame{};

  void burn() {
    if (remaining == 0) fail(ErrorCode::Fuel, blame, "step budget exhausted during reduction");
    --remaining;
  }
};

}  // namespace stratt
