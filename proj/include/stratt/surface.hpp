#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stratt/basics.hpp"

namespace stratt {

// Concrete syntax:
//
//   program ::= decl*                                  -- "--" comments to eol
//   decl    ::= IDENT ":" ["^" NAT] term
//             | IDENT "=" term
//             | "data" IDENT param* ":" ["^" NAT] term "where" "{" ctor (";" ctor)* "}"
//   param   ::= "(" IDENT ":" ["^" NAT] term ")"       -- caret => fixed, else floating
//   ctor    ::= IDENT ":" ["^" NAT] term
//   term    ::= "\" IDENT+ "." term
//             | "(" IDENT ":" ["^" NAT] term ")" "->" term
//             | app "->" term
//             | app
//   app     ::= atom+
//   atom    ::= "Type" | "Void" | "absurd" atom
//             | "case" term "of" "{" branch (";" branch)* "}"
//             | IDENT ["^" NAT] | "(" term ")" | "(" term ":" term ")"
//   branch  ::= IDENT IDENT* "->" term
//
// Application is left-associative, arrows are right-associative, lambda
// bodies extend maximally to the right. In a dependent domain an omitted
// caret means the fixed level is inferred; a bare A -> B is floating.

struct SurfaceTerm;
using SurfacePtr = std::shared_ptr<const SurfaceTerm>;

struct SurfaceBranch {
  std::string ctor;
  std::vector<std::string> binders;
  SurfacePtr body;
  Span span{};
};

struct SurfaceTerm {
  enum class K { Star, Bottom, Var, Pi, Arrow, Lam, App, Absurd, Ann, Case };
  K k;
  Span span{};
  std::string name;                       // Var name / Pi binder / Lam binder (one per node)
  std::optional<Level> lvl;               // Pi domain level; Var displacement
  bool hasCaret = false;                  // Var: whether ^N was written (even ^0)
  SurfacePtr a, b;                        // Pi{dom,cod} Arrow{dom,cod} Lam{body=a} App{fn,arg} Absurd{a} Ann{tm,ty}
  std::vector<SurfaceBranch> branches;    // Case; scrutinee in a
};

namespace surf {

inline std::shared_ptr<SurfaceTerm> node(SurfaceTerm::K k, Span sp) {
  auto t = std::make_shared<SurfaceTerm>();
  t->k = k;
  t->span = sp;
  return t;
}

}  // namespace surf

struct SurfaceParam {
  std::string name;
  std::optional<Level> fixedLevel;  // present => fixed parameter
  SurfacePtr type;
  Span span{};
};

struct SurfaceCtor {
  std::string name;
  std::optional<Level> level;
  SurfacePtr type;
  Span span{};
};

struct SurfaceDecl {
  enum class K { Sig, Def, Data };
  K k;
  std::string name;
  Span span{};
  std::optional<Level> level;           // Sig / Data level annotation
  SurfacePtr term;                      // Sig type / Def body / Data index type
  std::vector<SurfaceParam> params;     // Data
  std::vector<SurfaceCtor> ctors;       // Data
};

// --- lexer -------------------------------------------------------------------

namespace lex {

enum class Tok {
  Ident, Nat, Type, Void, Absurd, Case, Of, Data, Where,
  LParen, RParen, LBrace, RBrace, Colon, Semi, Equals, Lambda, Dot, Arrow, Caret,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

inline bool identStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool identCont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> tokenize(const std::string& src, std::uint32_t file) {
  std::vector<Token> out;
  std::uint32_t line = 1, col = 1;
  std::size_t i = 0;
  auto here = [&] { return Span{file, line, col}; };
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
      if (src[i + j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Span sp = here();
    if (identStart(c)) {
      std::size_t j = i;
      while (j < src.size() && identCont(src[j])) ++j;
      std::string word = src.substr(i, j - i);
      advance(j - i);
      Tok k = Tok::Ident;
      if (word == "Type") k = Tok::Type;
      else if (word == "Void") k = Tok::Void;
      else if (word == "absurd") k = Tok::Absurd;
      else if (word == "case") k = Tok::Case;
      else if (word == "of") k = Tok::Of;
      else if (word == "data") k = Tok::Data;
      else if (word == "where") k = Tok::Where;
      out.push_back(Token{k, std::move(word), sp});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back(Token{Tok::Nat, src.substr(i, j - i), sp});
      advance(j - i);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back(Token{Tok::Arrow, "->", sp});
      advance(2);
      continue;
    }
    switch (c) {
      case '(': out.push_back(Token{Tok::LParen, "(", sp}); break;
      case ')': out.push_back(Token{Tok::RParen, ")", sp}); break;
      case '{': out.push_back(Token{Tok::LBrace, "{", sp}); break;
      case '}': out.push_back(Token{Tok::RBrace, "}", sp}); break;
      case ':': out.push_back(Token{Tok::Colon, ":", sp}); break;
      case ';': out.push_back(Token{Tok::Semi, ";", sp}); break;
      case '=': out.push_back(Token{Tok::Equals, "=", sp}); break;
      case '\\': out.push_back(Token{Tok::Lambda, "\\", sp}); break;
      case '.': out.push_back(Token{Tok::Dot, ".", sp}); break;
      case '^': out.push_back(Token{Tok::Caret, "^", sp}); break;
      default:
        fail(ErrorCode::Parse, sp, std::string("unexpected character '") + c + "'");
    }
    advance(1);
  }
  out.push_back(Token{Tok::Eof, "", here()});
  return out;
}

}  // namespace lex

// --- parser ------------------------------------------------------------------

class Parser {
 public:
  Parser(std::string src, std::uint32_t file) : toks_(lex::tokenize(src, file)) {}

  std::vector<SurfaceDecl> program() {
    std::vector<SurfaceDecl> out;
    while (!at(lex::Tok::Eof)) out.push_back(decl());
    return out;
  }

  // Exposed for the reduce command and tests.
  SurfacePtr termOnly() {
    SurfacePtr t = term();
    expect(lex::Tok::Eof, "end of input");
    return t;
  }

 private:
  std::vector<lex::Token> toks_;
  std::size_t pos_ = 0;

  const lex::Token& peek(std::size_t n = 0) const {
    std::size_t i = pos_ + n;
    if (i >= toks_.size()) i = toks_.size() - 1;
    return toks_[i];
  }
  bool at(lex::Tok k, std::size_t n = 0) const { return peek(n).kind == k; }
  lex::Token take() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  lex::Token expect(lex::Tok k, const char* what) {
    if (!at(k)) fail(ErrorCode::Parse, peek().span, std::string("expected ") + what);
    return take();
  }

  Level nat() {
    lex::Token t = expect(lex::Tok::Nat, "a level literal");
    return static_cast<Level>(std::stoul(t.text));
  }

  std::optional<Level> caretLevel() {
    if (!at(lex::Tok::Caret)) return std::nullopt;
    take();
    return nat();
  }

  SurfaceDecl decl() {
    if (at(lex::Tok::Data)) return dataDecl();
    lex::Token name = expect(lex::Tok::Ident, "a declaration name");
    if (at(lex::Tok::Colon)) {
      take();
      SurfaceDecl d;
      d.k = SurfaceDecl::K::Sig;
      d.name = name.text;
      d.span = name.span;
      d.level = caretLevel();
      d.term = term();
      return d;
    }
    if (at(lex::Tok::Equals)) {
      take();
      SurfaceDecl d;
      d.k = SurfaceDecl::K::Def;
      d.name = name.text;
      d.span = name.span;
      d.term = term();
      return d;
    }
    fail(ErrorCode::Parse, peek().span, "expected ':' or '=' after declaration name");
  }

  SurfaceDecl dataDecl() {
    lex::Token kw = expect(lex::Tok::Data, "'data'");
    SurfaceDecl d;
    d.k = SurfaceDecl::K::Data;
    d.span = kw.span;
    d.name = expect(lex::Tok::Ident, "a datatype name").text;
    while (at(lex::Tok::LParen)) {
      lex::Token open = take();
      SurfaceParam p;
      p.span = open.span;
      p.name = expect(lex::Tok::Ident, "a parameter name").text;
      expect(lex::Tok::Colon, "':'");
      p.fixedLevel = caretLevel();
      p.type = term();
      expect(lex::Tok::RParen, "')'");
      d.params.push_back(std::move(p));
    }
    expect(lex::Tok::Colon, "':'");
    d.level = caretLevel();
    d.term = term();
    expect(lex::Tok::Where, "'where'");
    expect(lex::Tok::LBrace, "'{'");
    for (;;) {
      SurfaceCtor c;
      lex::Token cn = expect(lex::Tok::Ident, "a constructor name");
      c.name = cn.text;
      c.span = cn.span;
      expect(lex::Tok::Colon, "':'");
      c.level = caretLevel();
      c.type = term();
      d.ctors.push_back(std::move(c));
      if (at(lex::Tok::Semi)) {
        take();
        continue;
      }
      break;
    }
    expect(lex::Tok::RBrace, "'}'");
    return d;
  }

  SurfacePtr term() {
    if (at(lex::Tok::Lambda)) return lambda();
    return arrowish();
  }

  SurfacePtr lambda() {
    lex::Token slash = expect(lex::Tok::Lambda, "'\\'");
    std::vector<lex::Token> binders;
    while (at(lex::Tok::Ident)) binders.push_back(take());
    if (binders.empty()) fail(ErrorCode::Parse, peek().span, "expected a binder after '\\'");
    expect(lex::Tok::Dot, "'.'");
    SurfacePtr body = term();
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
      auto t = surf::node(SurfaceTerm::K::Lam, slash.span);
      auto& m = *t;
      m.name = it->text;
      m.a = body;
      body = t;
    }
    return body;
  }

  // Handles dependent domains, floating arrows, and plain applications.
  SurfacePtr arrowish() {
    // "(" IDENT ":" ... is either a Pi domain (when "->" follows) or an
    // ascribed variable atom; the caret form must be a Pi domain.
    if (at(lex::Tok::LParen) && at(lex::Tok::Ident, 1) && at(lex::Tok::Colon, 2)) {
      lex::Token open = take();
      lex::Token name = take();
      take();  // ':'
      std::optional<Level> lvl = caretLevel();
      bool hadCaret = lvl.has_value();
      SurfacePtr ty = term();
      expect(lex::Tok::RParen, "')'");
      if (at(lex::Tok::Arrow)) {
        take();
        SurfacePtr cod = term();
        auto t = surf::node(SurfaceTerm::K::Pi, open.span);
        auto& m = *t;
        m.name = name.text;
        m.lvl = lvl;
        m.a = ty;
        m.b = cod;
        return t;
      }
      if (hadCaret)
        fail(ErrorCode::Parse, open.span, "a level-annotated domain must be followed by '->'");
      auto v = surf::node(SurfaceTerm::K::Var, name.span);
      v->name = name.text;
      auto ann = surf::node(SurfaceTerm::K::Ann, open.span);
      auto& m = *ann;
      m.a = v;
      m.b = ty;
      return appFrom(ann);
    }
    SurfacePtr lhs = app();
    if (at(lex::Tok::Arrow)) {
      lex::Token arr = take();
      SurfacePtr rhs = term();
      auto t = surf::node(SurfaceTerm::K::Arrow, arr.span);
      auto& m = *t;
      m.a = lhs;
      m.b = rhs;
      return t;
    }
    return lhs;
  }

  bool atAtomStart() const {
    switch (peek().kind) {
      case lex::Tok::Type:
      case lex::Tok::Void:
      case lex::Tok::Absurd:
      case lex::Tok::Case:
      case lex::Tok::LParen:
        return true;
      case lex::Tok::Ident:
        // a bare IDENT followed by ':' or '=' can only be the next
        // declaration; ascriptions are always parenthesized
        return !at(lex::Tok::Colon, 1) && !at(lex::Tok::Equals, 1);
      default:
        return false;
    }
  }

  SurfacePtr app() { return appFrom(atom()); }

  SurfacePtr appFrom(SurfacePtr head) {
    while (atAtomStart()) {
      SurfacePtr arg = atom();
      auto t = surf::node(SurfaceTerm::K::App, head->span);
      auto& m = *t;
      m.a = head;
      m.b = arg;
      head = t;
    }
    if (at(lex::Tok::Arrow)) {
      lex::Token arr = take();
      SurfacePtr rhs = term();
      auto t = surf::node(SurfaceTerm::K::Arrow, arr.span);
      auto& m = *t;
      m.a = head;
      m.b = rhs;
      return t;
    }
    return head;
  }

  SurfacePtr atom() {
    const lex::Token& t0 = peek();
    switch (t0.kind) {
      case lex::Tok::Type:
        take();
        return surf::node(SurfaceTerm::K::Star, t0.span);
      case lex::Tok::Void:
        take();
        return surf::node(SurfaceTerm::K::Bottom, t0.span);
      case lex::Tok::Absurd: {
        take();
        SurfacePtr arg = atom();
        auto t = surf::node(SurfaceTerm::K::Absurd, t0.span);
        t->a = arg;
        return t;
      }
      case lex::Tok::Case:
        return caseTerm();
      case lex::Tok::Ident: {
        take();
        auto t = surf::node(SurfaceTerm::K::Var, t0.span);
        auto& m = *t;
        m.name = t0.text;
        if (at(lex::Tok::Caret)) {
          take();
          m.lvl = nat();
          m.hasCaret = true;
        }
        return t;
      }
      case lex::Tok::LParen: {
        take();
        SurfacePtr inner = term();
        if (at(lex::Tok::Colon)) {
          take();
          SurfacePtr ty = term();
          expect(lex::Tok::RParen, "')'");
          auto t = surf::node(SurfaceTerm::K::Ann, t0.span);
          auto& m = *t;
          m.a = inner;
          m.b = ty;
          return t;
        }
        expect(lex::Tok::RParen, "')'");
        return inner;
      }
      default:
        fail(ErrorCode::Parse, t0.span, "expected a term");
    }
  }

  SurfacePtr caseTerm() {
    lex::Token kw = expect(lex::Tok::Case, "'case'");
    SurfacePtr scrut = term();
    expect(lex::Tok::Of, "'of'");
    expect(lex::Tok::LBrace, "'{'");
    std::vector<SurfaceBranch> branches;
    for (;;) {
      SurfaceBranch br;
      lex::Token cn = expect(lex::Tok::Ident, "a constructor name");
      br.ctor = cn.text;
      br.span = cn.span;
      while (at(lex::Tok::Ident)) br.binders.push_back(take().text);
      expect(lex::Tok::Arrow, "'->'");
      br.body = term();
      branches.push_back(std::move(br));
      if (at(lex::Tok::Semi)) {
        take();
        continue;
      }
      break;
    }
    expect(lex::Tok::RBrace, "'}'");
    auto t = surf::node(SurfaceTerm::K::Case, kw.span);
    auto& m = *t;
    m.a = scrut;
    m.branches = std::move(branches);
    return t;
  }
};

inline std::vector<SurfaceDecl> parseProgram(const std::string& src, std::uint32_t file = 0) {
  Parser p(src, file);
  return p.program();
}

// --- annotation erasure (inference reproduction) ------------------------------

inline SurfacePtr eraseTermAnnotations(const SurfacePtr& t) {
  if (!t) return t;
  auto copy = std::make_shared<SurfaceTerm>(*t);
  switch (t->k) {
    case SurfaceTerm::K::Var:
      copy->lvl.reset();
      copy->hasCaret = false;
      break;
    case SurfaceTerm::K::Pi:
      copy->lvl.reset();
      break;
    default:
      break;
  }
  copy->a = eraseTermAnnotations(t->a);
  copy->b = eraseTermAnnotations(t->b);
  for (auto& br : copy->branches) br.body = eraseTermAnnotations(br.body);
  return copy;
}

// Strips every level and displacement annotation. Datatype parameter carets
// are kept: a caret is what distinguishes a fixed parameter from a floating
// one, so removing it would change the declaration's meaning.
inline std::vector<SurfaceDecl> eraseAnnotations(const std::vector<SurfaceDecl>& decls) {
  std::vector<SurfaceDecl> out = decls;
  for (auto& d : out) {
    d.level.reset();
    d.term = eraseTermAnnotations(d.term);
    for (auto& c : d.ctors) {
      c.level.reset();
      c.type = eraseTermAnnotations(c.type);
    }
    for (auto& p : d.params) p.type = eraseTermAnnotations(p.type);
  }
  return out;
}

}  // namespace stratt
