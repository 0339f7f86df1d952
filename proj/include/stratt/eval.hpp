#pragma once

#include <string>
#include <vector>

#include "stratt/context.hpp"
#include "stratt/print.hpp"
#include "stratt/term.hpp"

namespace stratt {

// Call-by-name beta/delta reduction with iota for case, per the reduction
// rules: (\x.b) a steps to b{a/x}; a displaced constant unfolds to its body
// displaced by the same amount; case over a saturated constructor steps into
// the matching branch. Reduction is bounded by a shared fuel budget since
// recursion is unchecked.

inline bool isValueHead(const TermPtr& t) {
  switch (t->k) {
    case Term::K::Star:
    case Term::K::Bottom:
    case Term::K::Pi:
    case Term::K::Arrow:
    case Term::K::Lam:
    case Term::K::Ctor:
      return true;
    default:
      return false;
  }
}

class Evaluator {
 public:
  Evaluator(const Signature& sig, Fuel& fuel) : sig_(sig), fuel_(fuel) {}

  const Signature& signature() const { return sig_; }
  Fuel& fuel() const { return fuel_; }

  // Weak-head normal form: no beta/delta/iota redex in head position.
  TermPtr whnf(TermPtr t) const {
    for (;;) {
      t = skipAnn(t);
      switch (t->k) {
        case Term::K::Const: {
          const DefEntry* def = sig_.findDef(t->name);
          if (def && def->body) {
            fuel_.burn();
            t = displaceTerm(def->body, t->lvl);
            continue;
          }
          return t;  // declared-only constant or datatype head: rigid
        }
        case Term::K::App: {
          TermPtr fn = whnf(t->a);
          if (fn->k == Term::K::Lam) {
            fuel_.burn();
            t = open1(fn->a, t->b);
            continue;
          }
          if (isValueHead(fn))
            fail(ErrorCode::Stuck, t->span,
                 "application of a non-function value: " + printTerm(fn));
          return fn == skipAnn(t->a) ? t : mkApp(fn, t->b, t->span);
        }
        case Term::K::Case: {
          TermPtr s = whnf(t->a);
          if (s->k == Term::K::Ctor) {
            const CaseBranch* br = nullptr;
            for (const auto& cand : t->branches)
              if (cand.ctor == s->name) {
                br = &cand;
                break;
              }
            if (!br)
              fail(ErrorCode::Stuck, t->span, "no branch for constructor " + s->name);
            if (br->binders.size() != s->args.size())
              fail(ErrorCode::Stuck, t->span, "arity mismatch in branch for " + s->name);
            fuel_.burn();
            t = openN(br->body, s->args);
            continue;
          }
          if (isValueHead(s))
            fail(ErrorCode::Stuck, t->span,
                 "case scrutinee is not a constructor: " + printTerm(s));
          return s == skipAnn(t->a) ? t : mkCase(s, t->branches, t->span);
        }
        case Term::K::Absurd: {
          TermPtr s = whnf(t->a);
          if (isValueHead(s))
            fail(ErrorCode::Stuck, t->span, "absurd applied to a value: " + printTerm(s));
          return s == skipAnn(t->a) ? t : mkAbsurd(s, t->span);
        }
        default:
          return t;
      }
    }
  }

  // True when the term makes at least one head step. Throws E-STUCK on
  // genuinely stuck terms, which the progress suite reports as a failure.
  bool headSteps(const TermPtr& t) const {
    const TermPtr& s = skipAnn(t);
    if (s != t) return true;  // ascription peels off
    switch (s->k) {
      case Term::K::Const: {
        const DefEntry* def = sig_.findDef(s->name);
        return def && def->body;
      }
      case Term::K::App:
      case Term::K::Case:
      case Term::K::Absurd:
        return !alphaEqual(whnf(s), s);
      default:
        return false;
    }
  }

  bool isNeutralSpine(const TermPtr& t) const {
    const TermPtr& s = skipAnn(t);
    switch (s->k) {
      case Term::K::FVar: return true;
      case Term::K::Const: {
        const DefEntry* def = sig_.findDef(s->name);
        return !(def && def->body);
      }
      case Term::K::App:
      case Term::K::Absurd:
        return isNeutralSpine(s->a);
      case Term::K::Case:
        return isNeutralSpine(s->a);
      default:
        return false;
    }
  }

  // Full normalization: whnf, then recurse under binders and into arguments.
  TermPtr normalize(const TermPtr& t) const {
    TermPtr w = whnf(t);
    switch (w->k) {
      case Term::K::Star:
      case Term::K::Bottom:
      case Term::K::FVar:
      case Term::K::BVar:
      case Term::K::Const:
        return w;
      case Term::K::Pi: {
        TermPtr dom = normalize(w->a);
        std::string x = freshInternal();
        TermPtr cod = close1(normalize(open1(w->b, mkFVar(x))), x);
        return mkPi(w->lvl, dom, w->name, cod, w->span);
      }
      case Term::K::Arrow:
        return mkArrow(normalize(w->a), normalize(w->b), w->span);
      case Term::K::Lam: {
        std::string x = freshInternal();
        TermPtr body = close1(normalize(open1(w->a, mkFVar(x))), x);
        return mkLam(w->name, body, w->span);
      }
      case Term::K::App:
        return mkApp(normalize(w->a), normalize(w->b), w->span);
      case Term::K::Absurd:
        return mkAbsurd(normalize(w->a), w->span);
      case Term::K::Ann:
        return normalize(w->a);  // unreachable after whnf
      case Term::K::Ctor: {
        std::vector<TermPtr> args;
        args.reserve(w->args.size());
        for (const auto& a : w->args) args.push_back(normalize(a));
        return mkCtor(w->name, w->lvl, std::move(args), w->span);
      }
      case Term::K::Case: {
        TermPtr scrut = normalize(w->a);
        std::vector<CaseBranch> brs;
        brs.reserve(w->branches.size());
        for (const auto& br : w->branches) {
          std::vector<TermPtr> vars;
          std::vector<std::string> names;
          for (std::size_t i = 0; i < br.binders.size(); ++i) {
            names.push_back(freshInternal());
            vars.push_back(mkFVar(names.back()));
          }
          TermPtr body = closeN(normalize(openN(br.body, vars)), names);
          brs.push_back(CaseBranch{br.ctor, br.binders, body});
        }
        return mkCase(scrut, std::move(brs), w->span);
      }
    }
    return w;
  }

  // Algorithmic definitional equality: joinability under weak-head reduction
  // plus congruence. Comparing Pi types emits an equality constraint between
  // their domain levels; rigid heads with distinct names never match. No eta.
  bool equate(const TermPtr& lhs, const TermPtr& rhs, std::vector<Constraint>& sink,
              Span blame) const {
    // constants with equal name and displacement compare reflexively before
    // unfolding; alpha equality covers that and all other identical shapes
    if (alphaEqual(lhs, rhs)) return true;
    TermPtr a = whnf(lhs);
    TermPtr b = whnf(rhs);
    if (a->k != b->k) return false;
    switch (a->k) {
      case Term::K::Star:
      case Term::K::Bottom:
        return true;
      case Term::K::FVar:
        return a->name == b->name;
      case Term::K::BVar:
        return a->idx == b->idx;
      case Term::K::Const: {
        if (a->name != b->name) return false;  // rigid after whnf
        return equateLevels(a->lvl, b->lvl, sink, blame, "DE-Const");
      }
      case Term::K::Pi: {
        if (!equateLevels(a->lvl, b->lvl, sink, blame, "DE-Pi")) return false;
        if (!equate(a->a, b->a, sink, blame)) return false;
        TermPtr v = mkFVar(freshInternal());
        return equate(open1(a->b, v), open1(b->b, v), sink, blame);
      }
      case Term::K::Arrow:
        return equate(a->a, b->a, sink, blame) && equate(a->b, b->b, sink, blame);
      case Term::K::Lam: {
        TermPtr v = mkFVar(freshInternal());
        return equate(open1(a->a, v), open1(b->a, v), sink, blame);
      }
      case Term::K::App:
        return equate(a->a, b->a, sink, blame) && equate(a->b, b->b, sink, blame);
      case Term::K::Absurd:
        return equate(a->a, b->a, sink, blame);
      case Term::K::Ann:
        return false;  // unreachable after whnf
      case Term::K::Ctor: {
        if (a->name != b->name || a->args.size() != b->args.size()) return false;
        if (!equateLevels(a->lvl, b->lvl, sink, blame, "DE-Data")) return false;
        for (std::size_t i = 0; i < a->args.size(); ++i)
          if (!equate(a->args[i], b->args[i], sink, blame)) return false;
        return true;
      }
      case Term::K::Case: {
        if (!equate(a->a, b->a, sink, blame)) return false;
        if (a->branches.size() != b->branches.size()) return false;
        for (const auto& ba : a->branches) {
          const CaseBranch* match = nullptr;
          for (const auto& bb : b->branches)
            if (bb.ctor == ba.ctor) {
              match = &bb;
              break;
            }
          if (!match || match->binders.size() != ba.binders.size()) return false;
          std::vector<TermPtr> vars;
          for (std::size_t i = 0; i < ba.binders.size(); ++i)
            vars.push_back(mkFVar(freshInternal()));
          if (!equate(openN(ba.body, vars), openN(match->body, vars), sink, blame))
            return false;
        }
        return true;
      }
    }
    return false;
  }

 private:
  bool equateLevels(const LevelExpr& x, const LevelExpr& y, std::vector<Constraint>& sink,
                    Span blame, const char* rule) const {
    if (x == y) return true;
    if (x.concrete() && y.concrete()) return false;
    sink.push_back(eqc(x, y, ConstraintNote{rule, blame}));
    return true;
  }

  // Internal names start with '%', which the grammar cannot produce, so they
  // never collide with user variables. They only live inside this module:
  // every opened binder is closed again before a term escapes.
  std::string freshInternal() const { return "%v" + std::to_string(counter_++); }

  const Signature& sig_;
  Fuel& fuel_;
  mutable std::uint64_t counter_ = 0;
};

}  // namespace stratt
