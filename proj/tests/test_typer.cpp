#include <catch2/catch_amalgamated.hpp>

#include "stratt/data.hpp"
#include "stratt/driver.hpp"

using namespace stratt;

namespace {

CheckOutcome run(const std::string& src, DriverOptions opts = {}) {
  return checkSources({{"<test>", src}}, opts);
}

Level levelOf(const CheckOutcome& out, const std::string& name) {
  for (const auto& st : out.stats)
    if (st.name == name) return st.level;
  FAIL("no such definition: " + name);
  return 0;
}

}  // namespace

TEST_CASE("checking basics") {
  Signature sig;
  Elaborator el(sig);

  SECTION("identity against a floating arrow at level 0") {
    Context ctx;
    REQUIRE(el.accepts(ctx, mkLam("x", mkBVar(0)), 0, mkArrow(mkBottom(), mkBottom())));
  }

  SECTION("polymorphic identity at level 1") {
    Context ctx;
    TermPtr ty = mkPi(LevelExpr(0), mkStar(), "X", mkArrow(mkBVar(0), mkBVar(0)));
    TermPtr tm = mkLam("X", mkLam("x", mkBVar(0)));
    REQUIRE(el.accepts(ctx, tm, 1, ty));
    REQUIRE_FALSE(el.accepts(ctx, tm, 0, ty));  // the domain needs 0 < k
  }

  SECTION("absurd eliminates into any type at the same level") {
    Context ctx;
    ctx.push("b", LevelExpr(0), mkBottom());
    REQUIRE(el.accepts(ctx, mkAbsurd(mkFVar("b")), 0, mkStar()));
    REQUIRE(el.accepts(ctx, mkAbsurd(mkFVar("b")), 2, mkArrow(mkStar(), mkBottom())));
  }

  SECTION("subsumption: lower entries serve higher judgements") {
    Context ctx;
    ctx.push("A", LevelExpr(0), mkStar());
    ctx.push("a", LevelExpr(1), mkFVar("A"));
    REQUIRE(el.accepts(ctx, mkFVar("a"), 3, mkFVar("A")));
    REQUIRE_FALSE(el.accepts(ctx, mkFVar("a"), 0, mkFVar("A")));
  }

  SECTION("type-in-type") {
    Context ctx;
    REQUIRE(el.accepts(ctx, mkStar(), 0, mkStar()));
  }
}

TEST_CASE("level inference minimality oracle for the identity") {
  // enumerate the annotated variants and confirm the solver lands on the
  // pointwise-least accepted pair (domain level, definition level)
  Signature sig;
  Elaborator el(sig);
  Context empty;
  TermPtr tm = mkLam("X", mkLam("x", mkBVar(0)));
  std::vector<std::pair<Level, Level>> accepted;
  for (Level j = 0; j <= 3; ++j)
    for (Level k = 0; k <= 3; ++k) {
      TermPtr ty = mkPi(LevelExpr(j), mkStar(), "X", mkArrow(mkBVar(0), mkBVar(0)));
      if (el.accepts(empty, tm, k, ty)) accepted.emplace_back(j, k);
    }
  REQUIRE_FALSE(accepted.empty());
  auto least = accepted[0];
  for (auto& [j, k] : accepted) {
    least.first = std::min(least.first, j);
    least.second = std::min(least.second, k);
  }
  REQUIRE(least == std::make_pair(Level(0), Level(1)));
  REQUIRE(std::count(accepted.begin(), accepted.end(), least) == 1);

  auto out = run("id : (X : Type) -> X -> X\nid = \\X x. x");
  REQUIRE(out.exitCode == 0);
  REQUIRE(levelOf(out, "id") == 1);
  REQUIRE(alphaEqual(out.sig.findDef("id")->type,
                     mkPi(LevelExpr(0), mkStar(), "X", mkArrow(mkBVar(0), mkBVar(0)))));
}

TEST_CASE("error paths") {
  SECTION("unbound names") {
    auto out = run("t :^0 Type\nt = mystery");
    REQUIRE(out.exitCode == 1);
    REQUIRE(out.diags[0].code == ErrorCode::Unbound);
  }

  SECTION("application of a non-function") {
    auto out = run("t :^0 Type\nt = Type Type");
    REQUIRE(out.exitCode == 1);
    REQUIRE(out.diags[0].code == ErrorCode::NotFunction);
  }

  SECTION("bare lambda cannot be inferred") {
    auto out = run("t :^0 Type\nt = (\\x. x) Type");
    REQUIRE(out.exitCode == 1);
    REQUIRE(out.diags[0].code == ErrorCode::CannotInfer);
  }

  SECTION("ascription recovers inference") {
    auto out = run("t :^0 Type\nt = ((\\x. x) : Type -> Type) Type");
    REQUIRE(out.exitCode == 0);
  }

  SECTION("conversion failure shows both sides in whnf") {
    auto out = run("f :^0 Type -> Type\nf = \\X. X\nt :^0 Void\nt = f Void");
    REQUIRE(out.exitCode == 1);
    REQUIRE(out.diags[0].code == ErrorCode::Mismatch);
    REQUIRE(out.diags[0].message.find("Type") != std::string::npos);
    REQUIRE(out.diags[0].message.find("Void") != std::string::npos);
  }

  SECTION("definition without a signature") {
    auto out = run("t = Type");
    REQUIRE(out.exitCode == 1);
    REQUIRE(out.diags[0].code == ErrorCode::Unbound);
  }

  SECTION("duplicate names") {
    auto out = run("t :^0 Type\nt = Type\nt :^0 Type\nt = Void");
    REQUIRE(out.exitCode == 1);
  }

  SECTION("arrow-vs-pi is a hard mismatch") {
    auto out = run(
        "g :^1 ((X :^0 Type) -> Type) -> Type\ng = \\h. h Void\n"
        "t :^1 Type\nt = g (\\X. X)");
    // \X. X checks against the Pi; but passing a floating-typed function is
    // rejected
    REQUIRE(out.exitCode == 0);
    auto out2 = run(
        "f :^0 Type -> Type\nf = \\X. X\n"
        "g :^1 ((X :^0 Type) -> Type) -> Type\ng = \\h. h Void\n"
        "t :^1 Type\nt = g f");
    REQUIRE(out2.exitCode == 1);
    REQUIRE(out2.diags[0].code == ErrorCode::Mismatch);
  }
}

TEST_CASE("declaration handling") {
  SECTION("postulates participate and recursion sees its own signature") {
    auto out = run("ax :^1 Type\nuse :^1 Type\nuse = ax\nloop : Void\nloop = loop");
    REQUIRE(out.exitCode == 0);
    REQUIRE(out.sig.findDef("ax")->body == nullptr);
    REQUIRE(out.sig.findDef("loop")->body != nullptr);
  }

  SECTION("a later definition may close an earlier signature") {
    auto out = run("f :^1 Type\ng :^1 Type\ng = Void\nf = g");
    REQUIRE(out.exitCode == 0);
    REQUIRE(out.sig.findDef("f")->body != nullptr);
  }

  SECTION("solve-and-freeze: a signature adjacent to its body is solved as one unit") {
    // the body forces the level to 2; splitting the unit would freeze k = 1
    auto out = run(
        "eq :^1 (X :^0 Type) -> X -> X -> Type\neq = \\X x y. (P :^0 X -> Type) -> P x -> P y\n"
        "isSet2 : (X : Type) -> Type\n"
        "isSet2 = \\X. (x : X) -> (y : X) -> (p : eq X x y) -> (q : eq X x y) -> eq (eq X x y) p q");
    REQUIRE(out.exitCode == 0);
    REQUIRE(levelOf(out, "isSet2") == 2);
  }
}

TEST_CASE("paper corpus reproduces levels inline") {
  auto out = run(R"(
id :^1 (X :^0 Type) -> X -> X
id = \X x. x

idid1 :^2 ((X :^1 Type) -> X -> X) -> (X :^0 Type) -> X -> X
idid1 = \id. id ((X :^0 Type) -> X -> X) (\X. id X)
)");
  REQUIRE(out.exitCode == 0);
  REQUIRE(levelOf(out, "id") == 1);
  REQUIRE(levelOf(out, "idid1") == 2);

  SECTION("the dependent-only self-application is rejected with level provenance") {
    auto bad = run(R"(
idid1 :^3 (id :^2 (X :^1 Type) -> (x :^1 X) -> X) -> (X :^0 Type) -> (x :^0 X) -> X
idid1 = \id. id ((X :^0 Type) -> (x :^0 X) -> X) (\X x. id X x)
)");
    REQUIRE(bad.exitCode == 1);
    REQUIRE(bad.diags[0].code == ErrorCode::LevelUnsat);
    REQUIRE_FALSE(bad.diags[0].provenance.empty());
  }
}

TEST_CASE("no-infer mode") {
  DriverOptions strict;
  strict.noInfer = true;
  REQUIRE(checkSources({{"<t>", "id : (X : Type) -> X -> X\nid = \\X x. x"}}, strict).exitCode ==
          1);
  auto out = checkSources({{"<t>", "id : (X : Type) -> X -> X\nid = \\X x. x"}}, strict);
  REQUIRE(out.diags[0].code == ErrorCode::CannotInfer);
  REQUIRE(
      checkSources({{"<t>", "id :^1 (X :^0 Type) -> X -> X\nid = \\X x. x"}}, strict).exitCode ==
      0);
  // displacements must be written too
  REQUIRE(checkSources({{"<t>", "f :^0 Type\nf = Void\ng :^1 Type\ng = f"}}, strict).exitCode ==
          1);
  REQUIRE(
      checkSources({{"<t>", "f :^0 Type\nf = Void\ng :^1 Type\ng = f^0"}}, strict).exitCode == 0);
}
