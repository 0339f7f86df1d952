#pragma once

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stratt/context.hpp"
#include "stratt/term.hpp"

namespace stratt {

// Printer options. `annotateZero` prints explicit ^0 displacements so the
// output survives --no-infer; the pretty form elides them.
struct PrintOpts {
  bool annotateZero = false;
};

namespace detail {

class TermPrinter {
 public:
  TermPrinter(PrintOpts opts, std::set<std::string> avoid)
      : opts_(opts), avoid_(std::move(avoid)) {}

  // prec: 0 = term, 1 = arrow operand (app), 2 = atom
  void print(std::ostream& os, const TermPtr& t, int prec) {
    const TermPtr& s = skipAnn(t);
    switch (s->k) {
      case Term::K::Star: os << "Type"; return;
      case Term::K::Bottom: os << "Void"; return;
      case Term::K::FVar: os << s->name; return;
      case Term::K::BVar: os << "#" << s->idx; return;  // only in malformed input
      case Term::K::Const:
        os << s->name;
        printShift(os, s->lvl);
        return;
      case Term::K::Pi: {
        if (prec > 0) os << "(";
        std::string x = freshen(s->name.empty() ? "x" : s->name, s->b);
        os << "(" << x << " :^" << showLevelExpr(s->lvl) << " ";
        print(os, s->a, 0);
        os << ") -> ";
        Scoped sc(this, x);
        print(os, open1(s->b, mkFVar(x)), 0);
        if (prec > 0) os << ")";
        return;
      }
      case Term::K::Arrow: {
        if (prec > 0) os << "(";
        print(os, s->a, 1);
        os << " -> ";
        print(os, s->b, 0);
        if (prec > 0) os << ")";
        return;
      }
      case Term::K::Lam: {
        if (prec > 0) os << "(";
        os << "\\";
        // collapse nested binders: \x y z. body
        TermPtr cur = s;
        std::vector<std::string> names;
        bool first = true;
        std::vector<Scoped> scopes;
        while (cur->k == Term::K::Lam) {
          std::string x = freshen(cur->name.empty() ? "x" : cur->name, cur->a);
          if (!first) os << " ";
          os << x;
          first = false;
          scopes.emplace_back(this, x);
          cur = skipAnn(open1(cur->a, mkFVar(x)));
        }
        os << ". ";
        print(os, cur, 0);
        if (prec > 0) os << ")";
        return;
      }
      case Term::K::App: {
        if (prec > 1) os << "(";
        print(os, s->a, 1);
        os << " ";
        print(os, s->b, 2);
        if (prec > 1) os << ")";
        return;
      }
      case Term::K::Absurd: {
        if (prec > 1) os << "(";
        os << "absurd ";
        print(os, s->a, 2);
        if (prec > 1) os << ")";
        return;
      }
      case Term::K::Ann: return;  // unreachable, skipped above
      case Term::K::Ctor: {
        if (prec > 1 && !s->args.empty()) os << "(";
        os << s->name;
        printShift(os, s->lvl);
        for (const auto& a : s->args) {
          os << " ";
          print(os, a, 2);
        }
        if (prec > 1 && !s->args.empty()) os << ")";
        return;
      }
      case Term::K::Case: {
        if (prec > 1) os << "(";
        os << "case ";
        print(os, s->a, 0);
        os << " of { ";
        bool firstBr = true;
        for (const auto& br : s->branches) {
          if (!firstBr) os << " ; ";
          firstBr = false;
          os << br.ctor;
          std::vector<TermPtr> vars;
          std::vector<Scoped> scopes;
          for (const auto& hint : br.binders) {
            std::string x = freshen(hint.empty() ? "x" : hint, br.body);
            os << " " << x;
            scopes.emplace_back(this, x);
            vars.push_back(mkFVar(x));
          }
          os << " -> ";
          print(os, openN(br.body, vars), 0);
        }
        os << " }";
        if (prec > 1) os << ")";
        return;
      }
    }
  }

 private:
  struct Scoped {
    TermPrinter* p;
    std::string name;
    Scoped(TermPrinter* pp, std::string n) : p(pp), name(std::move(n)) { p->avoid_.insert(name); }
    Scoped(Scoped&& o) noexcept : p(o.p), name(std::move(o.name)) { o.p = nullptr; }
    Scoped(const Scoped&) = delete;
    ~Scoped() {
      if (p) p->avoid_.erase(name);
    }
  };

  void printShift(std::ostream& os, const LevelExpr& e) {
    if (e.concrete() && e.offset == 0 && !opts_.annotateZero) return;
    os << "^" << showLevelExpr(e);
  }

  std::string freshen(const std::string& base, const TermPtr& body) {
    std::string x = base;
    while (avoid_.count(x) || occursFree(body, x)) x += "'";
    return x;
  }

  PrintOpts opts_;
  std::set<std::string> avoid_;
};

}  // namespace detail

namespace detail {

// Binder hints may not shadow globals mentioned in their scope, or the output
// would re-resolve them to the binder.
inline void collectConstNames(const TermPtr& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->k == Term::K::Const || t->k == Term::K::Ctor) out.insert(t->name);
  collectConstNames(t->a, out);
  collectConstNames(t->b, out);
  for (const auto& x : t->args) collectConstNames(x, out);
  for (const auto& br : t->branches) collectConstNames(br.body, out);
}

}  // namespace detail

inline std::string printTerm(const TermPtr& t, PrintOpts opts = {}) {
  std::set<std::string> avoid;
  collectFreeVars(t, avoid);
  detail::collectConstNames(t, avoid);
  std::ostringstream os;
  detail::TermPrinter(opts, std::move(avoid)).print(os, t, 0);
  return os.str();
}

inline std::string printTermPrec(const TermPtr& t, int prec, PrintOpts opts = {}) {
  std::set<std::string> avoid;
  collectFreeVars(t, avoid);
  detail::collectConstNames(t, avoid);
  std::ostringstream os;
  detail::TermPrinter(opts, std::move(avoid)).print(os, t, prec);
  return os.str();
}

// --- declarations -------------------------------------------------------------

inline std::string printDefEntry(const DefEntry& e, PrintOpts opts = {}) {
  std::ostringstream os;
  os << e.name << " :^" << showLevelExpr(e.level) << " " << printTerm(e.type, opts);
  if (e.body) os << "\n" << e.name << " = " << printTerm(e.body, opts);
  return os.str();
}

inline std::string printDataDecl(const DataDecl& d, PrintOpts opts = {}) {
  std::ostringstream os;
  os << "data " << d.name;
  for (const auto& p : d.params) {
    os << " (" << p.name << " :";
    if (p.fixed) os << "^" << showLevelExpr(p.level);
    os << " " << printTerm(p.type, opts) << ")";
  }
  os << " :^" << showLevelExpr(d.level) << " " << printTerm(d.indexType, opts) << " where { ";
  bool first = true;
  for (const auto& c : d.ctors) {
    if (!first) os << " ; ";
    first = false;
    // reassemble the constructor's surface type from its telescope
    std::ostringstream ct;
    std::vector<std::string> closeOrder;
    TermPtr result = nullptr;
    {
      // telescope entries print in order; the result is the datatype applied
      // to params then indices
      for (const auto& a : c.args) {
        if (a.fixed) {
          ct << "(" << a.name << " :^" << showLevelExpr(a.level) << " " << printTerm(a.type, opts)
             << ") -> ";
        } else {
          ct << printTermPrec(a.type, 1, opts) << " -> ";
        }
      }
      TermPtr head = mkConst(d.name, LevelExpr(0));
      for (const auto& p : d.params) head = mkApp(head, mkFVar(p.name));
      for (const auto& ix : c.indices) head = mkApp(head, ix);
      result = head;
    }
    os << c.name << " :^" << showLevelExpr(d.level) << " " << ct.str()
       << printTerm(result, opts);
  }
  os << " }";
  return os.str();
}

// Fully annotated program, suitable for re-checking under --no-infer.
inline std::string printSignature(const Signature& sig, PrintOpts opts = {.annotateZero = true}) {
  std::ostringstream os;
  bool first = true;
  for (const auto& e : sig.entries) {
    if (!first) os << "\n\n";
    first = false;
    if (const DefEntry* def = std::get_if<DefEntry>(&e)) {
      os << printDefEntry(*def, opts);
    } else {
      os << printDataDecl(std::get<DataDecl>(e), opts);
    }
  }
  if (!first) os << "\n";
  return os.str();
}

// Floating ctor argument types must print as arrow operands; handled above by
// printing the full type and wrapping at arrow level inside printDataDecl.

}  // namespace stratt
