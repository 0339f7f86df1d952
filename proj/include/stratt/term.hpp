#pragma once

#include <cassert>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stratt/basics.hpp"

namespace stratt {

// Terms use a locally nameless representation: bound variables are de Bruijn
// indices (BVar), free variables are names (FVar). Binders carry a name hint
// for printing only; alpha-equivalent terms are structurally equal.
//
// A Lam or Pi codomain binds one index; a Case branch with n binders binds n
// at once, with the last binder at index 0.
struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct CaseBranch {
  std::string ctor;
  std::vector<std::string> binders;  // hints; body binds binders.size() indices
  TermPtr body;
};

struct Term {
  enum class K {
    Star,
    Bottom,
    FVar,
    BVar,
    Const,   // global definition or datatype head, with displacement
    Pi,      // dependent function type with fixed domain level
    Arrow,   // nondependent function type with floating domain
    Lam,
    App,
    Absurd,
    Ann,     // ascription; erased after elaboration
    Ctor,    // saturated constructor application, with displacement
    Case,
  };

  K k;
  Span span{};
  std::string name;   // FVar/Const/Ctor name, Pi/Lam binder hint
  std::uint32_t idx = 0;  // BVar index
  LevelExpr lvl{};    // Pi domain level, Const/Ctor displacement
  TermPtr a, b;       // Pi{dom,cod} Arrow{dom,cod} Lam{body=a} App{fn,arg} Absurd{a} Ann{term,type}
  std::vector<TermPtr> args;        // Ctor arguments
  std::vector<CaseBranch> branches; // Case branches; scrutinee in `a`

  explicit Term(K kk) : k(kk) {}
};

inline TermPtr mkStar() {
  static const TermPtr t = std::make_shared<Term>(Term::K::Star);
  return t;
}
inline TermPtr mkBottom() {
  static const TermPtr t = std::make_shared<Term>(Term::K::Bottom);
  return t;
}
inline TermPtr mkFVar(std::string name, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::FVar);
  t->name = std::move(name);
  t->span = sp;
  return t;
}
inline TermPtr mkBVar(std::uint32_t idx) {
  auto t = std::make_shared<Term>(Term::K::BVar);
  t->idx = idx;
  return t;
}
inline TermPtr mkConst(std::string name, LevelExpr shift = LevelExpr(0), Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::Const);
  t->name = std::move(name);
  t->lvl = shift;
  t->span = sp;
  return t;
}
inline TermPtr mkPi(LevelExpr lvl, TermPtr dom, std::string hint, TermPtr cod, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::Pi);
  t->lvl = lvl;
  t->a = std::move(dom);
  t->name = std::move(hint);
  t->b = std::move(cod);
  t->span = sp;
  return t;
}
inline TermPtr mkArrow(TermPtr dom, TermPtr cod, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::Arrow);
  t->a = std::move(dom);
  t->b = std::move(cod);
  t->span = sp;
  return t;
}
inline TermPtr mkLam(std::string hint, TermPtr body, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::Lam);
  t->name = std::move(hint);
  t->a = std::move(body);
  t->span = sp;
  return t;
}
inline TermPtr mkApp(TermPtr fn, TermPtr arg, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::App);
  t->a = std::move(fn);
  t->b = std::move(arg);
  t->span = sp;
  return t;
}
inline TermPtr mkAbsurd(TermPtr scrut, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::Absurd);
  t->a = std::move(scrut);
  t->span = sp;
  return t;
}
inline TermPtr mkAnn(TermPtr tm, TermPtr ty, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::Ann);
  t->a = std::move(tm);
  t->b = std::move(ty);
  t->span = sp;
  return t;
}
inline TermPtr mkCtor(std::string name, LevelExpr shift, std::vector<TermPtr> args, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::Ctor);
  t->name = std::move(name);
  t->lvl = shift;
  t->args = std::move(args);
  t->span = sp;
  return t;
}
inline TermPtr mkCase(TermPtr scrut, std::vector<CaseBranch> branches, Span sp = {}) {
  auto t = std::make_shared<Term>(Term::K::Case);
  t->a = std::move(scrut);
  t->branches = std::move(branches);
  t->span = sp;
  return t;
}

inline const TermPtr& skipAnn(const TermPtr& t) {
  const TermPtr* p = &t;
  while ((*p)->k == Term::K::Ann) p = &(*p)->a;
  return *p;
}

// --- structural recursion helpers -------------------------------------------

namespace detail {

template <class F>
TermPtr mapTerm(const TermPtr& t, std::uint32_t depth, F&& f) {
  // f(t, depth) -> TermPtr or nullptr to recurse structurally
  if (TermPtr r = f(t, depth)) return r;
  auto rec = [&](const TermPtr& s, std::uint32_t d) { return mapTerm(s, d, f); };
  switch (t->k) {
    case Term::K::Star:
    case Term::K::Bottom:
    case Term::K::FVar:
    case Term::K::BVar:
    case Term::K::Const:
      return t;
    case Term::K::Pi: {
      TermPtr dom = rec(t->a, depth);
      TermPtr cod = rec(t->b, depth + 1);
      if (dom == t->a && cod == t->b) return t;
      return mkPi(t->lvl, dom, t->name, cod, t->span);
    }
    case Term::K::Arrow: {
      TermPtr dom = rec(t->a, depth);
      TermPtr cod = rec(t->b, depth);
      if (dom == t->a && cod == t->b) return t;
      return mkArrow(dom, cod, t->span);
    }
    case Term::K::Lam: {
      TermPtr body = rec(t->a, depth + 1);
      if (body == t->a) return t;
      return mkLam(t->name, body, t->span);
    }
    case Term::K::App: {
      TermPtr fn = rec(t->a, depth);
      TermPtr arg = rec(t->b, depth);
      if (fn == t->a && arg == t->b) return t;
      return mkApp(fn, arg, t->span);
    }
    case Term::K::Absurd: {
      TermPtr s = rec(t->a, depth);
      if (s == t->a) return t;
      return mkAbsurd(s, t->span);
    }
    case Term::K::Ann: {
      TermPtr tm = rec(t->a, depth);
      TermPtr ty = rec(t->b, depth);
      if (tm == t->a && ty == t->b) return t;
      return mkAnn(tm, ty, t->span);
    }
    case Term::K::Ctor: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& x : t->args) {
        args.push_back(rec(x, depth));
        changed |= args.back() != x;
      }
      if (!changed) return t;
      return mkCtor(t->name, t->lvl, std::move(args), t->span);
    }
    case Term::K::Case: {
      TermPtr scrut = rec(t->a, depth);
      std::vector<CaseBranch> brs;
      brs.reserve(t->branches.size());
      bool changed = scrut != t->a;
      for (const auto& br : t->branches) {
        TermPtr body = rec(br.body, depth + static_cast<std::uint32_t>(br.binders.size()));
        changed |= body != br.body;
        brs.push_back(CaseBranch{br.ctor, br.binders, body});
      }
      if (!changed) return t;
      return mkCase(scrut, std::move(brs), t->span);
    }
  }
  return t;
}

}  // namespace detail

// Open a body that binds `vals.size()` indices: binder j gets vals[j], so the
// last binder (index 0) gets vals.back(). vals must be locally closed.
inline TermPtr openN(const TermPtr& body, const std::vector<TermPtr>& vals) {
  if (vals.empty()) return body;
  const std::uint32_t n = static_cast<std::uint32_t>(vals.size());
  return detail::mapTerm(body, 0, [&](const TermPtr& t, std::uint32_t depth) -> TermPtr {
    if (t->k != Term::K::BVar) return nullptr;
    if (t->idx < depth || t->idx >= depth + n) return t;
    const TermPtr& v = vals[n - 1 - (t->idx - depth)];
    // keep the occurrence position when opening with a plain variable, so
    // diagnostics can blame the use site rather than the binder
    if (v->k == Term::K::FVar && t->span.valid()) return mkFVar(v->name, t->span);
    return v;
  });
}

inline TermPtr open1(const TermPtr& body, const TermPtr& val) { return openN(body, {val}); }

// Close over free variables: FVar(names[j]) becomes binder j of an n-ary
// binder wrapped around the result.
inline TermPtr closeN(const TermPtr& t, const std::vector<std::string>& names) {
  if (names.empty()) return t;
  const std::uint32_t n = static_cast<std::uint32_t>(names.size());
  return detail::mapTerm(t, 0, [&](const TermPtr& s, std::uint32_t depth) -> TermPtr {
    if (s->k != Term::K::FVar) return nullptr;
    for (std::uint32_t j = 0; j < n; ++j) {
      if (s->name == names[j]) return mkBVar(depth + (n - 1 - j));
    }
    return s;
  });
}

inline TermPtr close1(const TermPtr& t, const std::string& name) { return closeN(t, {name}); }

// Raises dangling indices >= cutoff by `by`; needed when wrapping an already
// resolved term in extra binders (constructor eta-expansion).
inline TermPtr shiftBVars(const TermPtr& t, std::uint32_t by) {
  if (by == 0) return t;
  return detail::mapTerm(t, 0, [&](const TermPtr& s, std::uint32_t depth) -> TermPtr {
    if (s->k != Term::K::BVar || s->idx < depth) return nullptr;
    if (s->k == Term::K::BVar) return mkBVar(s->idx + by);
    return nullptr;
  });
}

// Capture-avoiding substitution of a free variable. `val` must be locally
// closed, so no index adjustment is ever needed.
inline TermPtr substFree(const TermPtr& t, const std::string& name, const TermPtr& val) {
  return detail::mapTerm(t, 0, [&](const TermPtr& s, std::uint32_t) -> TermPtr {
    if (s->k == Term::K::FVar && s->name == name) return val;
    return nullptr;
  });
}

inline bool occursFree(const TermPtr& t, const std::string& name) {
  switch (t->k) {
    case Term::K::FVar: return t->name == name;
    case Term::K::Star:
    case Term::K::Bottom:
    case Term::K::BVar:
    case Term::K::Const: return false;
    case Term::K::Pi:
    case Term::K::Arrow:
    case Term::K::App:
    case Term::K::Ann:
      return occursFree(t->a, name) || occursFree(t->b, name);
    case Term::K::Lam:
    case Term::K::Absurd:
      return occursFree(t->a, name);
    case Term::K::Ctor:
      for (const auto& x : t->args)
        if (occursFree(x, name)) return true;
      return false;
    case Term::K::Case:
      if (occursFree(t->a, name)) return true;
      for (const auto& br : t->branches)
        if (occursFree(br.body, name)) return true;
      return false;
  }
  return false;
}

inline void collectFreeVars(const TermPtr& t, std::set<std::string>& out) {
  switch (t->k) {
    case Term::K::FVar: out.insert(t->name); return;
    case Term::K::Star:
    case Term::K::Bottom:
    case Term::K::BVar:
    case Term::K::Const: return;
    case Term::K::Pi:
    case Term::K::Arrow:
    case Term::K::App:
    case Term::K::Ann:
      collectFreeVars(t->a, out);
      collectFreeVars(t->b, out);
      return;
    case Term::K::Lam:
    case Term::K::Absurd:
      collectFreeVars(t->a, out);
      return;
    case Term::K::Ctor:
      for (const auto& x : t->args) collectFreeVars(x, out);
      return;
    case Term::K::Case:
      collectFreeVars(t->a, out);
      for (const auto& br : t->branches) collectFreeVars(br.body, out);
      return;
  }
}

// The displacement metafunction: raises every Pi domain level and every
// Const/Ctor displacement by `by`. Identity when by == 0.
inline TermPtr displaceTerm(const TermPtr& t, const LevelExpr& by) {
  if (by.concrete() && by.offset == 0) return t;
  return detail::mapTerm(t, 0, [&](const TermPtr& s, std::uint32_t) -> TermPtr {
    if (s->k == Term::K::Pi) {
      auto dom = displaceTerm(s->a, by);
      auto cod = displaceTerm(s->b, by);
      return mkPi(shiftLevel(s->lvl, by), dom, s->name, cod, s->span);
    }
    if (s->k == Term::K::Const) return mkConst(s->name, shiftLevel(s->lvl, by), s->span);
    if (s->k == Term::K::Ctor) {
      std::vector<TermPtr> args;
      args.reserve(s->args.size());
      for (const auto& x : s->args) args.push_back(displaceTerm(x, by));
      return mkCtor(s->name, shiftLevel(s->lvl, by), std::move(args), s->span);
    }
    return nullptr;
  });
}

inline TermPtr displaceTerm(const TermPtr& t, Level by) { return displaceTerm(t, LevelExpr(by)); }

// Alpha-equivalence is plain structural equality here; ascriptions are
// transparent since they are erased by elaboration anyway.
inline bool alphaEqual(const TermPtr& lhs, const TermPtr& rhs) {
  const TermPtr& x = skipAnn(lhs);
  const TermPtr& y = skipAnn(rhs);
  if (x == y) return true;
  if (x->k != y->k) return false;
  switch (x->k) {
    case Term::K::Star:
    case Term::K::Bottom: return true;
    case Term::K::FVar: return x->name == y->name;
    case Term::K::BVar: return x->idx == y->idx;
    case Term::K::Const: return x->name == y->name && x->lvl == y->lvl;
    case Term::K::Pi:
      return x->lvl == y->lvl && alphaEqual(x->a, y->a) && alphaEqual(x->b, y->b);
    case Term::K::Arrow:
    case Term::K::App:
      return alphaEqual(x->a, y->a) && alphaEqual(x->b, y->b);
    case Term::K::Lam:
    case Term::K::Absurd:
      return alphaEqual(x->a, y->a);
    case Term::K::Ann: return false;  // unreachable, skipped above
    case Term::K::Ctor: {
      if (x->name != y->name || !(x->lvl == y->lvl) || x->args.size() != y->args.size())
        return false;
      for (std::size_t i = 0; i < x->args.size(); ++i)
        if (!alphaEqual(x->args[i], y->args[i])) return false;
      return true;
    }
    case Term::K::Case: {
      if (!alphaEqual(x->a, y->a) || x->branches.size() != y->branches.size()) return false;
      // branch order is irrelevant; match by constructor name
      for (const auto& bx : x->branches) {
        bool found = false;
        for (const auto& by : y->branches) {
          if (bx.ctor != by.ctor) continue;
          found = bx.binders.size() == by.binders.size() && alphaEqual(bx.body, by.body);
          break;
        }
        if (!found) return false;
      }
      return true;
    }
  }
  return false;
}

// True when no level metavariable occurs anywhere in the term.
inline bool levelsConcrete(const TermPtr& t) {
  switch (t->k) {
    case Term::K::Star:
    case Term::K::Bottom:
    case Term::K::FVar:
    case Term::K::BVar: return true;
    case Term::K::Const: return t->lvl.concrete();
    case Term::K::Pi: return t->lvl.concrete() && levelsConcrete(t->a) && levelsConcrete(t->b);
    case Term::K::Arrow:
    case Term::K::App:
    case Term::K::Ann:
      return levelsConcrete(t->a) && levelsConcrete(t->b);
    case Term::K::Lam:
    case Term::K::Absurd:
      return levelsConcrete(t->a);
    case Term::K::Ctor: {
      if (!t->lvl.concrete()) return false;
      for (const auto& x : t->args)
        if (!levelsConcrete(x)) return false;
      return true;
    }
    case Term::K::Case: {
      if (!levelsConcrete(t->a)) return false;
      for (const auto& br : t->branches)
        if (!levelsConcrete(br.body)) return false;
      return true;
    }
  }
  return true;
}

// Substitute solved metavariables; used when freezing a checked definition.
template <class Solution>
TermPtr zonkTerm(const TermPtr& t, const Solution& solve) {
  auto z = [&](const LevelExpr& e) -> LevelExpr {
    if (e.concrete()) return e;
    return LevelExpr(solve(e.meta) + e.offset);
  };
  return detail::mapTerm(t, 0, [&](const TermPtr& s, std::uint32_t) -> TermPtr {
    switch (s->k) {
      case Term::K::Ann:
        // ascriptions have served their purpose once elaboration is done
        return zonkTerm(skipAnn(s), solve);
      case Term::K::Pi: {
        auto dom = zonkTerm(s->a, solve);
        auto cod = zonkTerm(s->b, solve);
        return mkPi(z(s->lvl), dom, s->name, cod, s->span);
      }
      case Term::K::Const:
        if (s->lvl.concrete()) return s;
        return mkConst(s->name, z(s->lvl), s->span);
      case Term::K::Ctor: {
        std::vector<TermPtr> args;
        args.reserve(s->args.size());
        for (const auto& x : s->args) args.push_back(zonkTerm(x, solve));
        return mkCtor(s->name, z(s->lvl), std::move(args), s->span);
      }
      default: return nullptr;
    }
  });
}

// Spine decomposition: f a1 .. an  ~~>  (f, [a1..an])
inline TermPtr spine(const TermPtr& t, std::vector<TermPtr>& args) {
  const TermPtr* p = &skipAnn(t);
  std::vector<const TermPtr*> rev;
  while ((*p)->k == Term::K::App) {
    rev.push_back(&(*p)->b);
    p = &skipAnn((*p)->a);
  }
  args.clear();
  args.reserve(rev.size());
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) args.push_back(**it);
  return *p;
}

inline TermPtr applySpine(TermPtr head, const std::vector<TermPtr>& args, std::size_t from = 0) {
  for (std::size_t i = from; i < args.size(); ++i) head = mkApp(std::move(head), args[i]);
  return head;
}

}  // namespace stratt
