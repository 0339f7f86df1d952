#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stratt/typer.hpp"

namespace stratt {

namespace detail {

// Decomposes a fully applied datatype type into head constant, parameter
// values, and index values. Returns nullptr when the shape does not match.
struct DataApp {
  const DataDecl* decl = nullptr;
  LevelExpr shift;
  std::vector<TermPtr> params;
  std::vector<TermPtr> indices;
};

inline std::size_t indexArity(const TermPtr& indexType) {
  std::size_t n = 0;
  const Term* cur = skipAnn(indexType).get();
  while (cur->k == Term::K::Arrow) {
    ++n;
    cur = skipAnn(cur->b).get();
  }
  return n;
}

inline bool matchDataApp(const Signature& sig, const TermPtr& whnfType, DataApp& out) {
  std::vector<TermPtr> args;
  TermPtr head = spine(whnfType, args);
  if (head->k != Term::K::Const) return false;
  const DataDecl* d = sig.findData(head->name);
  if (!d) return false;
  const std::size_t nP = d->params.size();
  const std::size_t nI = indexArity(d->indexType);
  if (args.size() != nP + nI) return false;
  out.decl = d;
  out.shift = head->lvl;
  out.params.assign(args.begin(), args.begin() + nP);
  out.indices.assign(args.begin() + nP, args.end());
  return true;
}

inline bool mentionsInternal(const TermPtr& t) {
  std::set<std::string> fvs;
  collectFreeVars(t, fvs);
  for (const auto& n : fvs)
    if (!n.empty() && n[0] == '%') return true;
  return false;
}

}  // namespace detail

// --- datatype declarations -----------------------------------------------------

inline void Elaborator::checkDataUnit(const SurfaceDecl& d) {
  if (sig_.known(d.name)) fail(ErrorCode::Unbound, d.span, "duplicate name: " + d.name);
  {
    std::set<std::string> seen;
    for (const auto& c : d.ctors) {
      if (sig_.known(c.name) || !seen.insert(c.name).second || c.name == d.name)
        fail(ErrorCode::Unbound, c.span, "duplicate name: " + c.name);
    }
    seen.clear();
    for (const auto& p : d.params)
      if (!seen.insert(p.name).second)
        fail(ErrorCode::Unbound, p.span, "duplicate parameter: " + p.name);
  }

  auto started = std::chrono::steady_clock::now();
  beginUnit(d.name, d.span);
  LevelExpr L = declaredLevel(d.level, d.span);

  DataDecl decl;
  decl.name = d.name;
  decl.level = L;
  decl.span = d.span;

  // parameter telescope: fixed parameters live strictly below the datatype
  // level, floating ones at it
  Context paramCtx;
  openNames_.clear();
  for (const auto& p : d.params) {
    std::vector<std::string> emptyStack;
    TermPtr ty = resolveIn(p.type, emptyStack);
    DataParam dp;
    dp.name = p.name;
    dp.type = ty;
    if (p.fixedLevel) {
      dp.fixed = true;
      dp.level = LevelExpr(*p.fixedLevel);
      emit(lt(dp.level, L, note("D-Data", p.span)));
      check(paramCtx, dp.level, ty, mkStar());
    } else {
      dp.fixed = false;
      dp.level = L;
      check(paramCtx, L, ty, mkStar());
    }
    paramCtx.push(p.name, dp.level, ty);
    openNames_.push_back(p.name);
    decl.params.push_back(std::move(dp));
  }

  // index type: an iterated floating arrow ending in Type
  {
    std::vector<std::string> emptyStack;
    decl.indexType = resolveIn(d.term, emptyStack);
  }
  check(paramCtx, L, decl.indexType, mkStar());
  {
    const Term* cur = skipAnn(decl.indexType).get();
    while (cur->k == Term::K::Arrow) cur = skipAnn(cur->b).get();
    if (cur->k != Term::K::Star) {
      openNames_.clear();
      fail(ErrorCode::Mismatch, d.span,
           "the index type of " + d.name +
               " must be an iterated nondependent arrow ending in Type");
    }
  }

  // floating parameters are nondependent: nothing later may mention them
  for (std::size_t i = 0; i < decl.params.size(); ++i) {
    if (decl.params[i].fixed) continue;
    const std::string& n = decl.params[i].name;
    bool used = occursFree(decl.indexType, n);
    for (std::size_t j = i + 1; j < decl.params.size() && !used; ++j)
      used = occursFree(decl.params[j].type, n);
    if (used) {
      openNames_.clear();
      fail(ErrorCode::Mismatch, d.span,
           "floating parameter " + n + " of " + d.name + " cannot be depended on");
    }
  }

  // standalone type of the datatype head, wrapping params around the indices
  {
    TermPtr tail = decl.indexType;
    for (auto it = decl.params.rbegin(); it != decl.params.rend(); ++it) {
      if (it->fixed)
        tail = mkPi(it->level, it->type, it->name, close1(tail, it->name));
      else
        tail = mkArrow(it->type, tail);
    }
    decl.constType = tail;
  }

  sig_.addData(decl);  // provisional: constructors may mention the datatype

  const std::size_t nIdx = detail::indexArity(decl.indexType);
  std::vector<CtorDecl> ctors;
  auto abort = [&](const CheckError& e) {
    openNames_.clear();
    sig_.pop();
    throw e;
  };

  try {
    for (const auto& c : d.ctors) {
      if (c.level) emit(eqc(LevelExpr(*c.level), L, note("D-Ctor", c.span)));
      std::vector<std::string> emptyStack;
      TermPtr ctype = resolveIn(c.type, emptyStack);
      Context ctorCtx = paramCtx;
      check(ctorCtx, L, ctype, mkStar());

      // decompose the checked constructor type into its telescope and result
      CtorDecl cd;
      cd.name = c.name;
      cd.span = c.span;
      std::set<std::string> usedNames;
      for (const auto& p : decl.params) usedNames.insert(p.name);
      TermPtr cur = skipAnn(ctype);
      for (;;) {
        if (cur->k == Term::K::Pi) {
          std::string x = cur->name.empty() ? "x" : cur->name;
          while (usedNames.count(x)) x += "'";
          usedNames.insert(x);
          cd.args.push_back(CtorArg{x, true, cur->lvl, cur->a});
          cur = skipAnn(open1(cur->b, mkFVar(x)));
          continue;
        }
        if (cur->k == Term::K::Arrow) {
          std::string x = "_a" + std::to_string(cd.args.size());
          while (usedNames.count(x)) x += "'";
          usedNames.insert(x);
          cd.args.push_back(CtorArg{x, false, L, cur->a});
          cur = skipAnn(cur->b);
          continue;
        }
        break;
      }
      std::vector<TermPtr> resultArgs;
      TermPtr head = spine(cur, resultArgs);
      if (head->k != Term::K::Const || head->name != d.name ||
          !(head->lvl == LevelExpr(0)))
        fail(ErrorCode::CtorResult, c.span,
             c.name + " must construct " + d.name + "; its result is " + printTerm(cur));
      if (resultArgs.size() != decl.params.size() + nIdx)
        fail(ErrorCode::CtorResult, c.span,
             c.name + " must apply " + d.name + " to all parameters and indices");
      for (std::size_t i = 0; i < decl.params.size(); ++i) {
        const TermPtr& a = skipAnn(resultArgs[i]);
        if (a->k != Term::K::FVar || a->name != decl.params[i].name)
          fail(ErrorCode::CtorResult, c.span,
               c.name + " must apply " + d.name + " to its parameters in order");
      }
      cd.indices.assign(resultArgs.begin() + decl.params.size(), resultArgs.end());
      ctors.push_back(std::move(cd));
    }
  } catch (const CheckError& e) {
    abort(e);
  }

  openNames_.clear();

  Assignment asg;
  try {
    asg = solveUnit();
  } catch (const CheckError&) {
    sig_.pop();
    throw;
  }
  auto zonk = [&](std::uint32_t m) { return asg[m]; };

  DataDecl* out = sig_.findData(d.name);
  out->level = LevelExpr(evalLevel(L, asg));
  for (auto& p : out->params) {
    p.level = LevelExpr(evalLevel(p.level, asg));
    p.type = zonkTerm(p.type, zonk);
  }
  out->indexType = zonkTerm(out->indexType, zonk);
  out->constType = zonkTerm(out->constType, zonk);
  out->ctors = std::move(ctors);
  for (auto& cd : out->ctors) {
    for (auto& a : cd.args) {
      a.level = LevelExpr(evalLevel(a.level, asg));
      a.type = zonkTerm(a.type, zonk);
    }
    for (auto& ix : cd.indices) ix = zonkTerm(ix, zonk);
  }
  // register the now-complete constructors
  {
    std::size_t at = sig_.byName.at(d.name);
    for (std::size_t i = 0; i < out->ctors.size(); ++i)
      sig_.ctorByName[out->ctors[i].name] = {at, i};
  }
  finishUnit(d.name, evalLevel(L, asg), started);
}

// --- constructor applications ---------------------------------------------------

inline void Elaborator::checkCtorApp(Context& ctx, const LevelExpr& k, const TermPtr& t,
                                     const TermPtr& expected) {
  auto [dd, cd] = sig_.findCtor(t->name);
  if (!dd) fail(ErrorCode::Unbound, t->span, "unknown constructor: " + t->name);

  TermPtr w = whnf(expected);
  detail::DataApp app;
  if (!detail::matchDataApp(sig_, w, app) || app.decl != dd)
    fail(ErrorCode::Mismatch, t->span,
         t->name + " builds a " + dd->name + ", but the expected type is " + printTerm(w));

  // a displaced constructor only belongs to its datatype at the same
  // displacement
  if (t->lvl.concrete() && app.shift.concrete()) {
    if (!(t->lvl == app.shift))
      fail(ErrorCode::Mismatch, t->span,
           t->name + "^" + showLevelExpr(t->lvl) + " cannot build " + dd->name + "^" +
               showLevelExpr(app.shift));
  } else {
    emit(eqc(t->lvl, app.shift, note("DT-Data", t->span)));
  }
  emit(leq(shiftLevel(dd->level, t->lvl), k, note("DT-Const", t->span)));

  if (t->args.size() != cd->args.size())
    fail(ErrorCode::CtorArity, t->span,
         t->name + " takes " + std::to_string(cd->args.size()) + " arguments, but " +
             std::to_string(t->args.size()) + " were given");

  // instantiate the stored telescope: displace by the use-site shift, then
  // substitute parameters, then earlier arguments
  std::vector<std::pair<std::string, TermPtr>> substs;
  for (std::size_t i = 0; i < dd->params.size(); ++i)
    substs.emplace_back(dd->params[i].name, app.params[i]);
  auto inst = [&](const TermPtr& stored) {
    TermPtr r = displaceTerm(stored, t->lvl);
    for (const auto& [n, v] : substs) r = substFree(r, n, v);
    return r;
  };

  for (std::size_t i = 0; i < cd->args.size(); ++i) {
    const CtorArg& spec = cd->args[i];
    TermPtr ty = inst(spec.type);
    if (spec.fixed)
      check(ctx, shiftLevel(spec.level, t->lvl), t->args[i], ty);
    else
      check(ctx, k, t->args[i], ty);
    substs.emplace_back(spec.name, t->args[i]);
  }

  for (std::size_t i = 0; i < cd->indices.size(); ++i) {
    TermPtr want = inst(cd->indices[i]);
    if (!conv(want, app.indices[i], t->span))
      fail(ErrorCode::Mismatch, t->span,
           "index mismatch in " + t->name + "\n  computed: " + printTerm(want) +
               "\n  expected: " + printTerm(app.indices[i]));
  }
}

// --- case elimination ------------------------------------------------------------

namespace detail {

// First-order syntactic unification of a constructor's result indices against
// the scrutinee type's indices: pattern binders bind, equal rigid heads
// recurse, distinct rigid heads refute the branch, anything else is E-UNIFY.
class IndexUnifier {
 public:
  IndexUnifier(const Evaluator& ev, std::vector<Constraint>& sink,
               const std::set<std::string>& binders, Span blame)
      : ev_(ev), sink_(sink), binders_(binders), blame_(blame) {}

  std::map<std::string, TermPtr> solution;
  bool refuted = false;

  void unify(const TermPtr& pat, const TermPtr& actual) {
    if (refuted) return;
    const TermPtr& p0 = skipAnn(pat);
    if (p0->k == Term::K::FVar && binders_.count(p0->name)) {
      auto it = solution.find(p0->name);
      if (it == solution.end()) {
        if (mentionsInternal(actual))
          fail(ErrorCode::Unify, blame_, "index unification escapes a binder");
        solution.emplace(p0->name, actual);
        return;
      }
      if (!ev_.equate(it->second, actual, sink_, blame_))
        fail(ErrorCode::Unify, blame_,
             "conflicting solutions for pattern variable " + p0->name);
      return;
    }
    TermPtr a = ev_.whnf(applySolution(p0));
    TermPtr b = ev_.whnf(actual);
    if (a->k == Term::K::FVar && binders_.count(a->name)) {
      unify(a, b);
      return;
    }
    if (rigid(a) && rigid(b)) {
      if (a->k != b->k) {
        refuted = true;
        return;
      }
      switch (a->k) {
        case Term::K::Star:
        case Term::K::Bottom:
          return;
        case Term::K::Const:
          if (a->name != b->name || !sameShift(a->lvl, b->lvl)) refuted = true;
          return;
        case Term::K::Ctor: {
          if (a->name != b->name || !sameShift(a->lvl, b->lvl) ||
              a->args.size() != b->args.size()) {
            refuted = true;
            return;
          }
          for (std::size_t i = 0; i < a->args.size() && !refuted; ++i)
            unify(a->args[i], b->args[i]);
          return;
        }
        case Term::K::Pi: {
          if (a->lvl.concrete() && b->lvl.concrete() && !(a->lvl == b->lvl)) {
            refuted = true;
            return;
          }
          if (!(a->lvl == b->lvl)) sink_.push_back(eqc(a->lvl, b->lvl, {"DE-Pi", blame_}));
          unify(a->a, b->a);
          if (!refuted) equateOrUnify(a->b, b->b, 1);
          return;
        }
        case Term::K::Arrow:
          unify(a->a, b->a);
          if (!refuted) unify(a->b, b->b);
          return;
        case Term::K::Lam:
          equateOrUnify(a->a, b->a, 1);
          return;
        default:
          break;
      }
    }
    // neutral against anything: settle by conversion or give up
    if (!ev_.equate(a, b, sink_, blame_))
      fail(ErrorCode::Unify, blame_,
           "cannot unify " + printTerm(a) + " with " + printTerm(b));
  }

 private:
  bool rigid(const TermPtr& t) const {
    switch (t->k) {
      case Term::K::Star:
      case Term::K::Bottom:
      case Term::K::Pi:
      case Term::K::Arrow:
      case Term::K::Lam:
      case Term::K::Ctor:
        return true;
      case Term::K::Const: {
        const DefEntry* def = ev_.signature().findDef(t->name);
        return !(def && def->body);  // whnf already unfolded defined constants
      }
      default:
        return false;
    }
  }

  bool sameShift(const LevelExpr& x, const LevelExpr& y) {
    if (x == y) return true;
    if (x.concrete() && y.concrete()) return false;
    sink_.push_back(eqc(x, y, {"DT-Data", blame_}));
    return true;
  }

  // under a binder, pattern variables may no longer bind; fall back to
  // conversion of the opened bodies
  void equateOrUnify(const TermPtr& pa, const TermPtr& pb, int) {
    TermPtr v = mkFVar("%u" + std::to_string(counter_++));
    TermPtr a = open1(applySolution(pa), v);
    TermPtr b = open1(pb, v);
    if (!ev_.equate(a, b, sink_, blame_))
      fail(ErrorCode::Unify, blame_,
           "cannot unify under a binder: " + printTerm(a) + " with " + printTerm(b));
  }

  TermPtr applySolution(const TermPtr& t) const {
    TermPtr r = t;
    for (const auto& [n, v] : solution) r = substFree(r, n, v);
    return r;
  }

  const Evaluator& ev_;
  std::vector<Constraint>& sink_;
  const std::set<std::string>& binders_;
  Span blame_;
  std::uint64_t counter_ = 0;
};

}  // namespace detail

inline void Elaborator::checkCase(Context& ctx, const LevelExpr& k, const TermPtr& t,
                                  const TermPtr& expected) {
  // the scrutinee gets its own level: constructor arguments of each branch
  // are typed as if the constructor were used at that level, which may sit
  // below the level of the whole expression
  LevelExpr j = freshMeta();
  emit(leq(j, k, note("DT-Case", t->span)));

  TermPtr scrutTy = whnf(infer(ctx, j, t->a));
  detail::DataApp app;
  if (!detail::matchDataApp(sig_, scrutTy, app))
    fail(ErrorCode::NotData, t->a->span.valid() ? t->a->span : t->span,
         "case scrutinee has type " + printTerm(scrutTy) +
             ", which is not a fully applied datatype");
  const DataDecl* dd = app.decl;
  emit(leq(shiftLevel(dd->level, app.shift), j, note("DT-Case", t->span)));

  // one branch per constructor, unless the indices make it impossible
  std::map<std::string, const CaseBranch*> byCtor;
  for (const auto& br : t->branches) {
    bool known = false;
    for (const auto& cd : dd->ctors) known |= cd.name == br.ctor;
    if (!known)
      fail(ErrorCode::Mismatch, t->span,
           "branch constructor " + br.ctor + " does not belong to " + dd->name);
    if (!byCtor.emplace(br.ctor, &br).second)
      fail(ErrorCode::NonExhaustive, t->span, "duplicate branch for " + br.ctor);
  }

  std::vector<std::pair<std::string, TermPtr>> paramSubsts;
  for (std::size_t i = 0; i < dd->params.size(); ++i)
    paramSubsts.emplace_back(dd->params[i].name, app.params[i]);

  const TermPtr& rawScrut = skipAnn(t->a);
  const bool refine = rawScrut->k == Term::K::FVar;

  for (const auto& cd : dd->ctors) {
    auto found = byCtor.find(cd.name);

    // instantiate this constructor's telescope in the scrutinee's frame
    auto instParams = [&](const TermPtr& stored) {
      TermPtr r = displaceTerm(stored, app.shift);
      for (const auto& [n, v] : paramSubsts) r = substFree(r, n, v);
      return r;
    };

    std::set<std::string> argNames;
    for (const auto& a : cd.args) argNames.insert(a.name);

    detail::IndexUnifier uni(ev(), unit_.constraints, argNames, t->span);
    for (std::size_t i = 0; i < cd.indices.size() && !uni.refuted; ++i)
      uni.unify(instParams(cd.indices[i]), app.indices[i]);

    if (uni.refuted) continue;  // impossible constructor; its branch may be omitted

    if (found == byCtor.end())
      fail(ErrorCode::NonExhaustive, t->span,
           "missing branch for constructor " + cd.name);
    const CaseBranch& br = *found->second;
    if (br.binders.size() != cd.args.size())
      fail(ErrorCode::CtorArity, t->span,
           cd.name + " takes " + std::to_string(cd.args.size()) + " arguments, but " +
               std::to_string(br.binders.size()) + " binders were given");

    Context branchCtx = ctx;
    std::vector<std::pair<std::string, TermPtr>> substs = paramSubsts;
    std::vector<TermPtr> openVals;
    for (std::size_t i = 0; i < cd.args.size(); ++i) {
      const CtorArg& spec = cd.args[i];
      TermPtr ty = displaceTerm(spec.type, app.shift);
      for (const auto& [n, v] : substs) ty = substFree(ty, n, v);
      auto solved = uni.solution.find(spec.name);
      if (solved != uni.solution.end()) {
        substs.emplace_back(spec.name, solved->second);
        openVals.push_back(solved->second);
        continue;
      }
      LevelExpr lvl = spec.fixed ? shiftLevel(spec.level, app.shift) : j;
      std::string hint = i < br.binders.size() && !br.binders[i].empty() ? br.binders[i] : "x";
      std::string x = pushBinder(branchCtx, hint, lvl, ty);
      substs.emplace_back(spec.name, mkFVar(x));
      openVals.push_back(mkFVar(x));
    }

    TermPtr goal = expected;
    if (refine) {
      // the scrutinee variable is rewritten to the constructor pattern in the
      // goal and throughout the context
      TermPtr pattern = mkCtor(cd.name, app.shift, openVals, t->span);
      goal = substFree(goal, rawScrut->name, pattern);
      for (auto& e : branchCtx.entries) e.type = substFree(e.type, rawScrut->name, pattern);
    }

    check(branchCtx, k, openN(br.body, openVals), goal);
  }
}

}  // namespace stratt
