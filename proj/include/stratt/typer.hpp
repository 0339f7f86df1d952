#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stratt/context.hpp"
#include "stratt/eval.hpp"
#include "stratt/print.hpp"
#include "stratt/solve.hpp"
#include "stratt/surface.hpp"
#include "stratt/term.hpp"

namespace stratt {

struct CheckOptions {
  bool noInfer = false;             // reject omitted annotations instead of inferring
  bool traceConstraints = false;
  std::uint64_t fuel = 100000;      // head steps per declaration
  std::ostream* traceOut = nullptr;
  const std::vector<std::string>* fileNames = nullptr;
};

struct UnitStats {
  std::string name;
  Level level = 0;
  std::size_t constraints = 0;
  std::int64_t micros = 0;
};

inline std::string renderSpan(const Span& sp, const std::vector<std::string>* files) {
  std::string file = "<input>";
  if (files && sp.file < files->size()) file = (*files)[sp.file];
  return file + ":" + std::to_string(sp.line) + ":" + std::to_string(sp.col);
}

// "<lhs> <= <rhs>  -- <rule> at <file:line:col>"; LT is shown with its +1
// normalization and EQ expands to two lines.
inline std::vector<std::string> renderConstraint(const Constraint& c,
                                                 const std::vector<std::string>* files) {
  auto line = [&](const LevelExpr& l, const LevelExpr& r) {
    return showLevelExpr(l) + " <= " + showLevelExpr(r) + "  -- " + c.note.rule + " at " +
           renderSpan(c.note.span, files);
  };
  switch (c.kind) {
    case Constraint::Kind::LE: return {line(c.lhs, c.rhs)};
    case Constraint::Kind::LT: return {line(c.lhs.plus(1), c.rhs)};
    case Constraint::Kind::EQ: return {line(c.lhs, c.rhs), line(c.rhs, c.lhs)};
  }
  return {};
}

// Bidirectional elaborator. Each top-level declaration (a signature/body pair
// or a datatype) is one constraint unit: metavariables are allocated for the
// annotations it omits, constraints are collected while checking, the least
// solution is substituted in, and the frozen entry joins the signature.
class Elaborator {
 public:
  Elaborator(Signature& sig, CheckOptions opts = {}) : sig_(sig), opts_(opts) {}

  const CheckOptions& options() const { return opts_; }
  const std::vector<UnitStats>& stats() const { return stats_; }
  Signature& signature() { return sig_; }

  // --- whole programs ---------------------------------------------------------

  std::vector<Diagnostic> checkProgram(const std::vector<SurfaceDecl>& decls,
                                       bool keepGoing = false) {
    std::vector<Diagnostic> diags;
    std::size_t i = 0;
    while (i < decls.size()) {
      std::size_t consumed = 1;
      try {
        const SurfaceDecl& d = decls[i];
        switch (d.k) {
          case SurfaceDecl::K::Data:
            checkDataUnit(d);
            break;
          case SurfaceDecl::K::Sig: {
            const SurfaceDecl* body = nullptr;
            if (i + 1 < decls.size() && decls[i + 1].k == SurfaceDecl::K::Def &&
                decls[i + 1].name == d.name) {
              body = &decls[i + 1];
              consumed = 2;
            }
            checkUnit(d, body);
            break;
          }
          case SurfaceDecl::K::Def:
            checkDefUnit(d);
            break;
        }
      } catch (const CheckError& e) {
        diags.push_back(e.diag);
        diags.back().unit = decls[i].name;
        if (!keepGoing) return diags;
      }
      i += consumed;
    }
    return diags;
  }

  // --- declaration units ------------------------------------------------------

  // Signature, optionally with its adjacent body; solves and freezes both.
  void checkUnit(const SurfaceDecl& sigDecl, const SurfaceDecl* defDecl) {
    if (sig_.known(sigDecl.name))
      fail(ErrorCode::Unbound, sigDecl.span, "duplicate name: " + sigDecl.name);
    auto started = std::chrono::steady_clock::now();
    beginUnit(sigDecl.name, sigDecl.span);
    LevelExpr k = declaredLevel(sigDecl.level, sigDecl.span);

    TermPtr type = resolve(sigDecl.term);
    Context empty;
    check(empty, k, type, mkStar());
    sig_.addDef(DefEntry{sigDecl.name, k, type, nullptr, sigDecl.span});

    TermPtr body;
    if (defDecl) {
      body = resolve(defDecl->term);
      try {
        check(empty, k, body, type);
      } catch (...) {
        sig_.pop();
        throw;
      }
    }

    Assignment asg;
    try {
      asg = solveUnit();
    } catch (...) {
      sig_.pop();
      throw;
    }
    auto zonk = [&](std::uint32_t m) { return asg[m]; };
    DefEntry* e = sig_.findDef(sigDecl.name);
    e->level = LevelExpr(evalLevel(k, asg));
    e->type = zonkTerm(type, zonk);
    if (body) e->body = zonkTerm(body, zonk);
    finishUnit(sigDecl.name, evalLevel(k, asg), started);
  }

  // Body for a signature frozen earlier (recursion through postulates keeps
  // working: the declared type is already concrete).
  void checkDefUnit(const SurfaceDecl& defDecl) {
    DefEntry* e = sig_.findDef(defDecl.name);
    if (!e)
      fail(ErrorCode::Unbound, defDecl.span,
           "definition of " + defDecl.name + " has no preceding signature");
    if (e->body)
      fail(ErrorCode::Unbound, defDecl.span, "duplicate definition: " + defDecl.name);
    auto started = std::chrono::steady_clock::now();
    beginUnit(defDecl.name, defDecl.span);
    TermPtr body = resolve(defDecl.term);
    Context empty;
    check(empty, e->level, body, e->type);
    Assignment asg = solveUnit();
    auto zonk = [&](std::uint32_t m) { return asg[m]; };
    e->body = zonkTerm(body, zonk);
    finishUnit(defDecl.name, e->level.value(), started);
  }

  void checkDataUnit(const SurfaceDecl& d);  // data.hpp

  // --- bidirectional core -----------------------------------------------------

  TermPtr infer(Context& ctx, const LevelExpr& k, const TermPtr& t) {
    switch (t->k) {
      case Term::K::Star:
        return mkStar();  // DT-Type: the universe is its own type at any level
      case Term::K::Bottom:
        return mkStar();  // DT-Bottom
      case Term::K::FVar: {
        const CtxEntry* e = ctx.lookup(t->name);
        if (!e) fail(ErrorCode::Unbound, t->span, "unbound variable: " + t->name);
        emit(leq(e->level, k, note("DT-Var", t->span)));
        return e->type;
      }
      case Term::K::Const: {
        if (const DefEntry* e = sig_.findDef(t->name)) {
          emit(leq(shiftLevel(e->level, t->lvl), k, note("DT-Const", t->span)));
          return displaceTerm(e->type, t->lvl);
        }
        if (const DataDecl* dd = sig_.findData(t->name)) {
          emit(leq(shiftLevel(dd->level, t->lvl), k, note("DT-Const", t->span)));
          return displaceTerm(dd->constType, t->lvl);
        }
        fail(ErrorCode::Unbound, t->span, "unbound constant: " + t->name);
      }
      case Term::K::Pi: {
        // DT-Pi: the domain sits at a strictly smaller level
        emit(lt(t->lvl, k, note("DT-Pi", t->span)));
        check(ctx, t->lvl, t->a, mkStar());
        std::string x = pushBinder(ctx, t->name, t->lvl, t->a);
        check(ctx, k, open1(t->b, mkFVar(x)), mkStar());
        ctx.entries.pop_back();
        return mkStar();
      }
      case Term::K::Arrow: {
        // DT-Arrow: domain, codomain, and arrow all at the same level
        check(ctx, k, t->a, mkStar());
        check(ctx, k, t->b, mkStar());
        return mkStar();
      }
      case Term::K::App: {
        TermPtr fnTy = whnf(infer(ctx, k, t->a));
        if (fnTy->k == Term::K::Pi) {
          // DT-AppTy: argument at the strictly smaller domain level
          check(ctx, fnTy->lvl, t->b, fnTy->a);
          return open1(fnTy->b, t->b);
        }
        if (fnTy->k == Term::K::Arrow) {
          // DT-AppTm: floating domain, same level as the whole application
          check(ctx, k, t->b, fnTy->a);
          return fnTy->b;
        }
        fail(ErrorCode::NotFunction, t->span,
             "application head has type " + printTerm(fnTy) + ", which is not a function type");
      }
      case Term::K::Ann: {
        check(ctx, k, t->b, mkStar());
        check(ctx, k, t->a, t->b);
        return t->b;
      }
      case Term::K::BVar:
        fail(ErrorCode::Unbound, t->span, "internal: dangling bound variable");
      case Term::K::Lam:
      case Term::K::Absurd:
      case Term::K::Case:
      case Term::K::Ctor:
        fail(ErrorCode::CannotInfer, t->span,
             "cannot infer a type here; add an ascription (term : type)");
    }
    fail(ErrorCode::CannotInfer, t->span, "unreachable");
  }

  void check(Context& ctx, const LevelExpr& k, const TermPtr& t, const TermPtr& expected) {
    switch (t->k) {
      case Term::K::Lam: {
        TermPtr w = whnf(expected);
        if (w->k == Term::K::Pi) {
          // DT-AbsTy: binder below the body level
          emit(lt(w->lvl, k, note("DT-AbsTy", t->span)));
          std::string x = pushBinder(ctx, t->name, w->lvl, w->a);
          check(ctx, k, open1(t->a, mkFVar(x)), open1(w->b, mkFVar(x)));
          ctx.entries.pop_back();
          return;
        }
        if (w->k == Term::K::Arrow) {
          // DT-AbsTm: floating binder at the same level
          std::string x = pushBinder(ctx, t->name, k, w->a);
          check(ctx, k, open1(t->a, mkFVar(x)), w->b);
          ctx.entries.pop_back();
          return;
        }
        fail(ErrorCode::Mismatch, t->span,
             "a function cannot have type " + printTerm(w));
      }
      case Term::K::Absurd:
        // DT-Absurd eliminates into any type at the same level
        check(ctx, k, t->a, mkBottom());
        return;
      case Term::K::Case:
        checkCase(ctx, k, t, expected);  // data.hpp
        return;
      case Term::K::Ctor:
        checkCtorApp(ctx, k, t, expected);  // data.hpp
        return;
      default: {
        TermPtr actual = infer(ctx, k, t);
        if (!conv(actual, expected, t->span)) {
          fail(ErrorCode::Mismatch, t->span,
               "type mismatch\n  expected: " + printTerm(whnfSafe(expected)) +
                   "\n  actual:   " + printTerm(whnfSafe(actual)));
        }
        return;
      }
    }
  }

  void checkCase(Context& ctx, const LevelExpr& k, const TermPtr& t, const TermPtr& expected);
  void checkCtorApp(Context& ctx, const LevelExpr& k, const TermPtr& t, const TermPtr& expected);

  // Re-check acceptance of a fully concrete judgement; the metatheory suites
  // drive the checker through this.
  bool accepts(const Context& ctx, const TermPtr& t, Level k, const TermPtr& type) {
    Unit saved = std::move(unit_);
    beginUnit("<recheck>", Span{});
    bool ok = true;
    try {
      Context working = ctx;
      check(working, LevelExpr(k), t, type);
      ok = std::holds_alternative<Assignment>(solveLevels(unit_.constraints, unit_.nextMeta));
    } catch (const CheckError&) {
      ok = false;
    }
    unit_ = std::move(saved);
    return ok;
  }

  bool acceptsInfer(const Context& ctx, const TermPtr& t, Level k, TermPtr* outType = nullptr) {
    Unit saved = std::move(unit_);
    beginUnit("<recheck>", Span{});
    bool ok = true;
    try {
      Context working = ctx;
      TermPtr ty = infer(working, LevelExpr(k), t);
      ok = std::holds_alternative<Assignment>(solveLevels(unit_.constraints, unit_.nextMeta));
      if (ok && outType) *outType = ty;
    } catch (const CheckError&) {
      ok = false;
    }
    unit_ = std::move(saved);
    return ok;
  }

  // --- surface resolution -----------------------------------------------------

  // Resolves names, allocates metavariables for omitted annotations, and
  // eta-expands unsaturated constructors.
  TermPtr resolve(const SurfacePtr& s) {
    std::vector<std::string> stack;
    return resolveIn(s, stack);
  }

  TermPtr resolveIn(const SurfacePtr& s, std::vector<std::string>& stack) {
    switch (s->k) {
      case SurfaceTerm::K::Star: return withSpan(mkStar(), s->span);
      case SurfaceTerm::K::Bottom: return withSpan(mkBottom(), s->span);
      case SurfaceTerm::K::Var:
        return resolveSpine(s, {}, stack);
      case SurfaceTerm::K::App: {
        // flatten the spine so constructor heads see all their arguments
        std::vector<const SurfaceTerm*> rev;
        const SurfaceTerm* cur = s.get();
        while (cur->k == SurfaceTerm::K::App) {
          rev.push_back(cur->b.get());
          cur = cur->a.get();
        }
        std::vector<TermPtr> args;
        for (auto it = rev.rbegin(); it != rev.rend(); ++it)
          args.push_back(resolveIn(wrap(*it), stack));
        if (cur->k == SurfaceTerm::K::Var) return resolveSpine(wrap(cur), args, stack);
        TermPtr head = resolveIn(wrap(cur), stack);
        return applySpine(head, args);
      }
      case SurfaceTerm::K::Pi: {
        LevelExpr lvl = s->lvl ? LevelExpr(*s->lvl) : freshMetaOrFail(s->span, "domain level");
        TermPtr dom = resolveIn(s->a, stack);
        stack.push_back(s->name);
        TermPtr cod = resolveIn(s->b, stack);
        stack.pop_back();
        return mkPi(lvl, dom, s->name, cod, s->span);
      }
      case SurfaceTerm::K::Arrow:
        return mkArrow(resolveIn(s->a, stack), resolveIn(s->b, stack), s->span);
      case SurfaceTerm::K::Lam: {
        stack.push_back(s->name);
        TermPtr body = resolveIn(s->a, stack);
        stack.pop_back();
        return mkLam(s->name, body, s->span);
      }
      case SurfaceTerm::K::Absurd:
        return mkAbsurd(resolveIn(s->a, stack), s->span);
      case SurfaceTerm::K::Ann:
        return mkAnn(resolveIn(s->a, stack), resolveIn(s->b, stack), s->span);
      case SurfaceTerm::K::Case: {
        TermPtr scrut = resolveIn(s->a, stack);
        std::vector<CaseBranch> branches;
        for (const auto& br : s->branches) {
          auto [dd, cd] = sig_.findCtor(br.ctor);
          if (!dd) fail(ErrorCode::Unbound, br.span, "unknown constructor: " + br.ctor);
          if (cd->args.size() != br.binders.size())
            fail(ErrorCode::CtorArity, br.span,
                 br.ctor + " takes " + std::to_string(cd->args.size()) + " arguments, but " +
                     std::to_string(br.binders.size()) + " binders were given");
          for (const auto& b : br.binders) stack.push_back(b);
          TermPtr body = resolveIn(br.body, stack);
          for (std::size_t j = 0; j < br.binders.size(); ++j) stack.pop_back();
          branches.push_back(CaseBranch{br.ctor, br.binders, body});
        }
        return mkCase(scrut, std::move(branches), s->span);
      }
    }
    fail(ErrorCode::Parse, s->span, "unreachable surface form");
  }

 protected:
  struct Unit {
    std::string selfName;
    std::vector<Constraint> constraints;
    std::uint32_t nextMeta = 0;
    Fuel fuel;
  };

  Signature& sig_;
  CheckOptions opts_;
  Unit unit_;
  std::vector<UnitStats> stats_;
  std::uint64_t freshCounter_ = 0;

  void beginUnit(const std::string& name, Span sp) {
    unit_ = Unit{};
    unit_.selfName = name;
    unit_.fuel.remaining = opts_.fuel;
    unit_.fuel.blame = sp;
    openNames_.clear();
  }

  Assignment solveUnit() {
    if (opts_.traceConstraints && opts_.traceOut) {
      for (const auto& c : unit_.constraints)
        for (const auto& line : renderConstraint(c, opts_.fileNames)) *opts_.traceOut << line << "\n";
    }
    SolveResult r = solveLevels(unit_.constraints, unit_.nextMeta);
    if (const Unsat* u = std::get_if<Unsat>(&r)) {
      std::vector<std::string> prov;
      for (const auto& c : u->cycle)
        for (const auto& line : renderConstraint(c, opts_.fileNames)) prov.push_back(line);
      fail(ErrorCode::LevelUnsat, unit_.fuel.blame,
           "level constraints are unsatisfiable for " + unit_.selfName, std::move(prov));
    }
    return std::get<Assignment>(std::move(r));
  }

  void finishUnit(const std::string& name, Level lvl,
                  std::chrono::steady_clock::time_point started) {
    auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                  std::chrono::steady_clock::now() - started)
                  .count();
    stats_.push_back(UnitStats{name, lvl, unit_.constraints.size(), us});
  }

  ConstraintNote note(const char* rule, Span sp) const { return ConstraintNote{rule, sp}; }
  void emit(Constraint c) { unit_.constraints.push_back(std::move(c)); }

  LevelExpr freshMeta() { return LevelExpr::metavar(unit_.nextMeta++); }
  LevelExpr freshMetaOrFail(Span sp, const char* what) {
    if (opts_.noInfer)
      fail(ErrorCode::CannotInfer, sp,
           std::string("omitted ") + what + " is not allowed under --no-infer");
    return freshMeta();
  }
  LevelExpr declaredLevel(const std::optional<Level>& lvl, Span sp) {
    if (lvl) return LevelExpr(*lvl);
    return freshMetaOrFail(sp, "level annotation");
  }

  Evaluator ev() const { return Evaluator(sig_, const_cast<Fuel&>(unit_.fuel)); }
  TermPtr whnf(const TermPtr& t) const { return ev().whnf(t); }
  TermPtr whnfSafe(const TermPtr& t) const {
    try {
      return ev().whnf(t);
    } catch (const CheckError&) {
      return t;
    }
  }
  bool conv(const TermPtr& a, const TermPtr& b, Span blame) {
    if (!blame.valid()) blame = unit_.fuel.blame;
    return ev().equate(a, b, unit_.constraints, blame);
  }

  std::string pushBinder(Context& ctx, const std::string& hint, LevelExpr lvl, TermPtr type) {
    std::string x = hint.empty() ? "x" : hint;
    while (ctx.lookup(x)) x += "'";
    ctx.push(x, lvl, std::move(type));
    return x;
  }

  static TermPtr withSpan(TermPtr t, Span sp) {
    if (t->span.valid() || !sp.valid()) return t;
    auto copy = std::make_shared<Term>(*t);
    copy->span = sp;
    return copy;
  }

  // shared_ptr views of borrowed surface nodes (no ownership transfer issues:
  // the surface AST outlives resolution)
  static SurfacePtr wrap(const SurfaceTerm* t) {
    return SurfacePtr(t, [](const SurfaceTerm*) {});
  }

  // Spine whose head is a surface variable: binders shadow datatype
  // parameters, which shadow globals. Constructor heads become saturated
  // applications, eta-expanding when given too few arguments.
  TermPtr resolveSpine(const SurfacePtr& head, std::vector<TermPtr> args,
                       std::vector<std::string>& stack) {
    const std::string& name = head->name;

    for (std::size_t d = 0; d < stack.size(); ++d) {
      if (stack[stack.size() - 1 - d] == name) {
        if (head->hasCaret)
          fail(ErrorCode::Parse, head->span, "a bound variable cannot be displaced: " + name);
        auto v = std::make_shared<Term>(Term::K::BVar);
        v->idx = static_cast<std::uint32_t>(d);
        v->span = head->span;
        return applySpine(v, args);
      }
    }
    for (const auto& open : openNames_) {
      if (open == name) {
        if (head->hasCaret)
          fail(ErrorCode::Parse, head->span, "a datatype parameter cannot be displaced: " + name);
        return applySpine(mkFVar(name, head->span), args);
      }
    }

    auto shift = [&]() -> LevelExpr {
      if (head->hasCaret) return LevelExpr(*head->lvl);
      // a recursive occurrence of the entity being checked is used undisplaced
      if (name == unit_.selfName) return LevelExpr(0);
      return freshMetaOrFail(head->span, "displacement");
    };

    if (sig_.findDef(name) || sig_.findData(name))
      return applySpine(mkConst(name, shift(), head->span), args);

    auto [dd, cd] = sig_.findCtor(name);
    if (dd) {
      const std::size_t arity = cd->args.size();
      LevelExpr sh = shift();
      if (args.size() >= arity) {
        std::vector<TermPtr> ctorArgs(args.begin(), args.begin() + arity);
        TermPtr ctor = mkCtor(name, sh, std::move(ctorArgs), head->span);
        return applySpine(ctor, args, arity);
      }
      // eta-expand: \y1..ym. C a1..ak y1..ym
      const std::uint32_t missing = static_cast<std::uint32_t>(arity - args.size());
      std::vector<TermPtr> full;
      full.reserve(arity);
      for (const auto& a : args) full.push_back(shiftBVars(a, missing));
      for (std::uint32_t j = 0; j < missing; ++j) full.push_back(mkBVar(missing - 1 - j));
      TermPtr body = mkCtor(name, sh, std::move(full), head->span);
      for (std::uint32_t j = 0; j < missing; ++j) {
        const auto& hint = cd->args[arity - 1 - j].name;
        body = mkLam(hint.empty() ? "y" : hint, body, head->span);
      }
      return body;
    }

    fail(ErrorCode::Unbound, head->span, "unbound name: " + name);
  }

  std::vector<std::string> openNames_;  // datatype parameters during a data unit
};

}  // namespace stratt
