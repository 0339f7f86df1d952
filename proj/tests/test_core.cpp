#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stratt/context.hpp"
#include "stratt/term.hpp"

using namespace stratt;

namespace {

// Small random terms over a fixed set of free variables; enough shape variety
// to exercise every constructor the core operations recurse through.
TermPtr randomTerm(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  if (depth == 0) {
    switch (pick(4)) {
      case 0: return mkStar();
      case 1: return mkBottom();
      case 2: return mkFVar("f" + std::to_string(pick(3)));
      default: return mkConst("c" + std::to_string(pick(2)), LevelExpr(pick(3)));
    }
  }
  switch (pick(7)) {
    case 0:
      return mkPi(LevelExpr(pick(3)), randomTerm(rng, depth - 1), "x",
                  close1(randomTerm(rng, depth - 1), "f0"));
    case 1: return mkArrow(randomTerm(rng, depth - 1), randomTerm(rng, depth - 1));
    case 2: return mkLam("x", close1(randomTerm(rng, depth - 1), "f1"));
    case 3: return mkApp(randomTerm(rng, depth - 1), randomTerm(rng, depth - 1));
    case 4: return mkAbsurd(randomTerm(rng, depth - 1));
    case 5:
      return mkCtor("C", LevelExpr(pick(3)), {randomTerm(rng, depth - 1)});
    default:
      return mkCase(randomTerm(rng, depth - 1),
                    {CaseBranch{"C", {"a"}, close1(randomTerm(rng, depth - 1), "f2")}});
  }
}

}  // namespace

TEST_CASE("displacement on terms") {
  SECTION("no levels inside") { REQUIRE(alphaEqual(displaceTerm(mkStar(), 3), mkStar())); }

  SECTION("dependent function domains shift") {
    TermPtr t = mkPi(LevelExpr(1), mkStar(), "x", mkBVar(0));
    TermPtr want = mkPi(LevelExpr(3), mkStar(), "x", mkBVar(0));
    REQUIRE(alphaEqual(displaceTerm(t, 2), want));
  }

  SECTION("constant displacement adds") {
    REQUIRE(alphaEqual(displaceTerm(mkConst("f", LevelExpr(1)), 2), mkConst("f", LevelExpr(3))));
  }

  SECTION("arrows carry no annotation of their own") {
    TermPtr a = mkPi(LevelExpr(0), mkStar(), "x", mkStar());
    TermPtr b = mkConst("g", LevelExpr(2));
    TermPtr arr = mkArrow(a, b);
    TermPtr shifted = displaceTerm(arr, 4);
    REQUIRE(shifted->k == Term::K::Arrow);
    REQUIRE(alphaEqual(shifted->a, displaceTerm(a, 4)));
    REQUIRE(alphaEqual(shifted->b, displaceTerm(b, 4)));
  }

  SECTION("zero displacement is the identity") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
      TermPtr t = randomTerm(rng, 3);
      REQUIRE(alphaEqual(displaceTerm(t, 0), t));
    }
  }

  SECTION("composes additively") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      TermPtr t = randomTerm(rng, 3);
      Level a = rng() % 6, b = rng() % 6;
      REQUIRE(alphaEqual(displaceTerm(displaceTerm(t, a), b), displaceTerm(t, a + b)));
    }
  }
}

TEST_CASE("substitution") {
  SECTION("hits free occurrences") {
    REQUIRE(alphaEqual(substFree(mkFVar("x"), "x", mkStar()), mkStar()));
  }

  SECTION("bound occurrences are untouched") {
    TermPtr lam = mkLam("x", mkBVar(0));
    REQUIRE(alphaEqual(substFree(lam, "x", mkStar()), lam));
  }

  SECTION("travels under applications") {
    TermPtr t = mkApp(mkFVar("f"), mkFVar("x"));
    REQUIRE(alphaEqual(substFree(t, "x", mkBottom()), mkApp(mkFVar("f"), mkBottom())));
  }

  SECTION("commutes with displacement") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
      TermPtr t = randomTerm(rng, 3);
      TermPtr s = randomTerm(rng, 2);
      Level d = rng() % 6;
      TermPtr lhs = displaceTerm(substFree(t, "f0", s), d);
      TermPtr rhs = substFree(displaceTerm(t, d), "f0", displaceTerm(s, d));
      REQUIRE(alphaEqual(lhs, rhs));
    }
  }
}

TEST_CASE("alpha equivalence ignores binder hints") {
  TermPtr a = mkLam("x", mkBVar(0));
  TermPtr b = mkLam("y", mkBVar(0));
  REQUIRE(alphaEqual(a, b));
  REQUIRE(alphaEqual(a, a));
  TermPtr pa = mkPi(LevelExpr(0), mkStar(), "x", mkBVar(0));
  TermPtr pb = mkPi(LevelExpr(0), mkStar(), "z", mkBVar(0));
  REQUIRE(alphaEqual(pa, pb));
  REQUIRE_FALSE(alphaEqual(pa, mkPi(LevelExpr(1), mkStar(), "x", mkBVar(0))));

  SECTION("equivalence relation, preserved by the core operations") {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 100; ++i) {
      TermPtr t = randomTerm(rng, 3);
      TermPtr u = randomTerm(rng, 3);
      REQUIRE(alphaEqual(t, t));
      if (alphaEqual(t, u)) {
        REQUIRE(alphaEqual(u, t));
        REQUIRE(alphaEqual(substFree(t, "f0", mkStar()), substFree(u, "f0", mkStar())));
        REQUIRE(alphaEqual(displaceTerm(t, 2), displaceTerm(u, 2)));
      }
    }
  }
}

TEST_CASE("context restriction") {
  Context g;
  g.push("x", LevelExpr(0), mkStar());
  g.push("y", LevelExpr(2), mkStar());

  Context r = restrictCtx(g, 1);
  REQUIRE(r.entries.size() == 1);
  REQUIRE(r.entries[0].name == "x");

  REQUIRE(restrictCtx(g, maxCtxLevel(g)).entries.size() == g.entries.size());
  REQUIRE(restrictCtx(Context{}, 3).entries.empty());

  SECTION("idempotent and a subsequence") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      Context ctx;
      int n = static_cast<int>(rng() % 6);
      for (int i = 0; i < n; ++i)
        ctx.push("v" + std::to_string(i), LevelExpr(rng() % 5), mkStar());
      Level k = rng() % 5;
      Context once = restrictCtx(ctx, k);
      Context twice = restrictCtx(once, k);
      REQUIRE(once.entries.size() == twice.entries.size());
      // subsequence check
      std::size_t at = 0;
      for (const auto& e : ctx.entries) {
        if (at < once.entries.size() && once.entries[at].name == e.name) ++at;
      }
      REQUIRE(at == once.entries.size());
    }
  }
}

TEST_CASE("context floating") {
  Context g;
  g.push("x", LevelExpr(1), mkFVar("A"));
  Context f = floatCtx(g, 1, 3);
  REQUIRE(f.entries[0].level == LevelExpr(3));
  REQUIRE(alphaEqual(f.entries[0].type, mkFVar("A")));  // no displacement

  Context g0;
  g0.push("x", LevelExpr(0), mkFVar("A"));
  REQUIRE(floatCtx(g0, 1, 3).entries[0].level == LevelExpr(0));  // level != j untouched

  REQUIRE(floatCtx(g, 2, 2).entries[0].level == LevelExpr(1));  // identity
  REQUIRE_THROWS_AS(floatCtx(g, 3, 1), std::invalid_argument);
}

TEST_CASE("context displacement") {
  Context g;
  g.push("x", LevelExpr(0), mkStar());
  Context d = displaceCtx(g, 2);
  REQUIRE(d.entries[0].level == LevelExpr(2));

  Context g2;
  g2.push("x", LevelExpr(1), mkPi(LevelExpr(0), mkStar(), "y", mkStar()));
  Context d2 = displaceCtx(g2, 1);
  REQUIRE(d2.entries[0].level == LevelExpr(2));
  REQUIRE(alphaEqual(d2.entries[0].type, mkPi(LevelExpr(1), mkStar(), "y", mkStar())));

  REQUIRE(displaceCtx(Context{}, 5).entries.empty());
}

TEST_CASE("spine decomposition round trips") {
  TermPtr t = mkApp(mkApp(mkConst("f", LevelExpr(0)), mkStar()), mkBottom());
  std::vector<TermPtr> args;
  TermPtr head = spine(t, args);
  REQUIRE(head->k == Term::K::Const);
  REQUIRE(args.size() == 2);
  REQUIRE(alphaEqual(applySpine(head, args), t));
}
