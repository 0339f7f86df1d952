#include <catch2/catch_amalgamated.hpp>

#include "stratt/driver.hpp"
#include "stratt/print.hpp"
#include "stratt/surface.hpp"

using namespace stratt;

TEST_CASE("parsing declarations") {
  SECTION("signature and definition") {
    auto ds = parseProgram("id :^1 (X :^0 Type) -> X -> X\nid = \\X x. x");
    REQUIRE(ds.size() == 2);
    REQUIRE(ds[0].k == SurfaceDecl::K::Sig);
    REQUIRE(ds[0].name == "id");
    REQUIRE(ds[0].level == Level{1});
    const SurfaceTerm& ty = *ds[0].term;
    REQUIRE(ty.k == SurfaceTerm::K::Pi);
    REQUIRE(ty.lvl == Level{0});
    REQUIRE(ty.b->k == SurfaceTerm::K::Arrow);
    REQUIRE(ds[1].k == SurfaceDecl::K::Def);
    REQUIRE(ds[1].term->k == SurfaceTerm::K::Lam);
    REQUIRE(ds[1].term->a->k == SurfaceTerm::K::Lam);
  }

  SECTION("omitted level becomes inferable") {
    auto ds = parseProgram("f : Void");
    REQUIRE(ds.size() == 1);
    REQUIRE_FALSE(ds[0].level.has_value());
    REQUIRE(ds[0].term->k == SurfaceTerm::K::Bottom);
  }

  SECTION("case syntax") {
    auto ds = parseProgram("x = case d of { Yes y -> y; No n -> absurd (nn n) }");
    REQUIRE(ds.size() == 1);
    const SurfaceTerm& t = *ds[0].term;
    REQUIRE(t.k == SurfaceTerm::K::Case);
    REQUIRE(t.branches.size() == 2);
    REQUIRE(t.branches[0].ctor == "Yes");
    REQUIRE(t.branches[0].binders == std::vector<std::string>{"y"});
    REQUIRE(t.branches[1].body->k == SurfaceTerm::K::Absurd);
  }

  SECTION("data declarations distinguish fixed and floating parameters") {
    auto ds = parseProgram(
        "data Eq (X :^0 Type) :^1 X -> X -> Type where { Refl :^1 (x :^0 X) -> Eq X x x }");
    REQUIRE(ds.size() == 1);
    REQUIRE(ds[0].k == SurfaceDecl::K::Data);
    REQUIRE(ds[0].params.size() == 1);
    REQUIRE(ds[0].params[0].fixedLevel == Level{0});
    auto ds2 = parseProgram("data Dec (X : Type) :^0 Type where { Yes :^0 X -> Dec X }");
    REQUIRE_FALSE(ds2[0].params[0].fixedLevel.has_value());
    REQUIRE(ds2[0].ctors.size() == 1);
  }
}

TEST_CASE("grammar determinism") {
  SECTION("application is left-associative") {
    auto ds = parseProgram("t = f a b");
    const SurfaceTerm& t = *ds[0].term;
    REQUIRE(t.k == SurfaceTerm::K::App);
    REQUIRE(t.a->k == SurfaceTerm::K::App);
    REQUIRE(t.a->a->name == "f");
    REQUIRE(t.b->name == "b");
  }

  SECTION("arrows are right-associative") {
    auto ds = parseProgram("t = Type -> Type -> Type");
    const SurfaceTerm& t = *ds[0].term;
    REQUIRE(t.k == SurfaceTerm::K::Arrow);
    REQUIRE(t.a->k == SurfaceTerm::K::Star);
    REQUIRE(t.b->k == SurfaceTerm::K::Arrow);
  }

  SECTION("lambda bodies extend right") {
    auto ds = parseProgram("t = \\x. f x -> Type");
    REQUIRE(ds[0].term->k == SurfaceTerm::K::Lam);
    REQUIRE(ds[0].term->a->k == SurfaceTerm::K::Arrow);
  }

  SECTION("ascription atoms") {
    auto ds = parseProgram("t = (x : Void)");
    REQUIRE(ds[0].term->k == SurfaceTerm::K::Ann);
    auto ds2 = parseProgram("t = (f x : Void)");
    REQUIRE(ds2[0].term->k == SurfaceTerm::K::Ann);
    REQUIRE(ds2[0].term->a->k == SurfaceTerm::K::App);
  }

  SECTION("displacement literals") {
    auto ds = parseProgram("t = nfst^1 x");
    REQUIRE(ds[0].term->a->lvl == Level{1});
    REQUIRE(ds[0].term->a->hasCaret);
  }

  SECTION("comments") {
    auto ds = parseProgram("-- a comment\nt = Type -- trailing\n");
    REQUIRE(ds.size() == 1);
  }
}

TEST_CASE("parse errors carry positions") {
  try {
    parseProgram("t = (x :^1 Void)");
    FAIL("expected a parse error");
  } catch (const CheckError& e) {
    REQUIRE(e.diag.code == ErrorCode::Parse);
    REQUIRE(e.diag.span.line == 1);
  }
  REQUIRE_THROWS_AS(parseProgram("t ="), CheckError);
  REQUIRE_THROWS_AS(parseProgram("data T : Type"), CheckError);
  REQUIRE_THROWS_AS(parseProgram("t = \\. x"), CheckError);
  REQUIRE_THROWS_AS(parseProgram("$"), CheckError);
}

TEST_CASE("printing") {
  REQUIRE(printTerm(mkStar()) == "Type");
  REQUIRE(printTerm(mkPi(LevelExpr(0), mkStar(), "X", mkArrow(mkBVar(0), mkBVar(0)))) ==
          "(X :^0 Type) -> X -> X");
  REQUIRE(printTerm(mkConst("nfst", LevelExpr(1))) == "nfst^1");
  REQUIRE(printTerm(mkConst("nfst", LevelExpr(0))) == "nfst");
  PrintOpts annotated{.annotateZero = true};
  REQUIRE(printTerm(mkConst("nfst", LevelExpr(0)), annotated) == "nfst^0");
  REQUIRE(printTerm(mkLam("X", mkLam("x", mkBVar(0)))) == "\\X x. x");
  REQUIRE(printTerm(mkApp(mkApp(mkFVar("f"), mkFVar("a")), mkFVar("b"))) == "f a b");
  REQUIRE(printTerm(mkApp(mkFVar("f"), mkApp(mkFVar("g"), mkFVar("a")))) == "f (g a)");
  REQUIRE(printTerm(mkArrow(mkArrow(mkStar(), mkStar()), mkStar())) ==
          "(Type -> Type) -> Type");

  SECTION("binder hints never capture globals or frees") {
    // \Dec. Dec' where the body also mentions the global Dec
    TermPtr body = mkApp(mkConst("Dec", LevelExpr(0)), mkBVar(0));
    std::string s = printTerm(mkLam("Dec", body));
    REQUIRE(s == "\\Dec'. Dec Dec'");
  }
}

TEST_CASE("print/parse round trip over elaborated corpus terms") {
  DriverOptions opts;
  auto out = checkFiles({std::string(STRATT_CORPUS_DIR) + "/identity.stt",
                         std::string(STRATT_CORPUS_DIR) + "/church.stt",
                         std::string(STRATT_CORPUS_DIR) + "/leibniz.stt"},
                        opts);
  REQUIRE(out.exitCode == 0);
  Elaborator el(out.sig);
  for (const auto& entry : out.sig.entries) {
    const DefEntry* def = std::get_if<DefEntry>(&entry);
    if (!def) continue;
    for (const TermPtr& t : {def->type, def->body}) {
      if (!t) continue;
      std::string printed = printTerm(t, PrintOpts{.annotateZero = true});
      auto reparsed = parseProgram("t = " + printed);
      REQUIRE(reparsed.size() == 1);
      TermPtr resolved = el.resolve(reparsed[0].term);
      REQUIRE(alphaEqual(resolved, t));
    }
  }
}
