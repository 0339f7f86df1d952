#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>

#include "stratt/solve.hpp"

using namespace stratt;

namespace {

ConstraintNote n() { return ConstraintNote{"test", Span{}}; }

LevelExpr m(std::uint32_t id, Level off = 0) { return LevelExpr::metavar(id, off); }

// Exhaustive enumeration oracle: the pointwise least satisfying assignment
// with every metavariable in 0..max, if any exists.
std::optional<Assignment> bruteLeast(const std::vector<Constraint>& cs, std::uint32_t nMetas,
                                     Level max) {
  std::vector<Level> cur(nMetas, 0);
  std::optional<Assignment> best;
  for (;;) {
    if (checkAssignment(cs, cur)) {
      if (!best) {
        best = cur;
      } else {
        for (std::uint32_t i = 0; i < nMetas; ++i) (*best)[i] = std::min((*best)[i], cur[i]);
      }
    }
    std::uint32_t i = 0;
    while (i < nMetas && cur[i] == max) cur[i++] = 0;
    if (i == nMetas) break;
    ++cur[i];
  }
  return best;
}

}  // namespace

TEST_CASE("solver examples") {
  SECTION("no constraints: least natural") {
    auto r = solveLevels({}, 1);
    REQUIRE(std::holds_alternative<Assignment>(r));
    REQUIRE(std::get<Assignment>(r)[0] == 0);
  }

  SECTION("chain with an equality") {
    // a < b, c = a + 2, b <= c
    std::vector<Constraint> cs = {lt(m(0), m(1), n()), eqc(m(2), m(0, 2), n()),
                                  leq(m(1), m(2), n())};
    auto oracle = bruteLeast(cs, 3, 3);
    REQUIRE(oracle.has_value());
    REQUIRE((*oracle)[0] == 0);
    REQUIRE((*oracle)[1] == 1);
    REQUIRE((*oracle)[2] == 2);
    auto r = solveLevels(cs, 3);
    REQUIRE(std::holds_alternative<Assignment>(r));
    REQUIRE(std::get<Assignment>(r) == *oracle);
  }

  SECTION("positive self cycle") {
    std::vector<Constraint> cs = {leq(m(0, 1), m(0), n())};  // a+1 <= a
    auto r = solveLevels(cs, 1);
    REQUIRE(std::holds_alternative<Unsat>(r));
    REQUIRE_FALSE(std::get<Unsat>(r).cycle.empty());
  }

  SECTION("two-element cycle") {
    std::vector<Constraint> cs = {lt(m(0), m(1), n()), lt(m(1), m(0), n())};
    auto r = solveLevels(cs, 2);
    REQUIRE(std::holds_alternative<Unsat>(r));
  }

  SECTION("violated concrete constraint") {
    std::vector<Constraint> cs = {leq(LevelExpr(2), LevelExpr(1), n())};
    REQUIRE(std::holds_alternative<Unsat>(solveLevels(cs, 0)));
  }

  SECTION("upper bounds hold") {
    // 2 <= a, a <= 3
    std::vector<Constraint> cs = {leq(LevelExpr(2), m(0), n()), leq(m(0), LevelExpr(3), n())};
    auto r = solveLevels(cs, 1);
    REQUIRE(std::get<Assignment>(r)[0] == 2);
  }
}

TEST_CASE("assignment checking") {
  REQUIRE(checkAssignment({lt(m(0), m(1), n())}, {0, 1}));
  REQUIRE_FALSE(checkAssignment({lt(m(0), m(1), n())}, {1, 1}));
  REQUIRE(checkAssignment({eqc(m(0), m(1, 2), n())}, {5, 3}));
}

TEST_CASE("solver soundness, minimality, monotonicity") {
  std::mt19937_64 rng(42);
  auto randExpr = [&](std::uint32_t nMetas) -> LevelExpr {
    Level off = rng() % 4;
    if (rng() % 4 == 0) return LevelExpr(off);
    return m(rng() % nMetas, off);
  };

  int satisfiable = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::uint32_t nMetas = 1 + rng() % 4;
    std::vector<Constraint> cs;
    std::size_t nCs = 1 + rng() % 6;
    for (std::size_t i = 0; i < nCs; ++i) {
      auto kind = static_cast<Constraint::Kind>(rng() % 3);
      cs.push_back(Constraint{kind, randExpr(nMetas), randExpr(nMetas), n()});
    }

    auto oracle = bruteLeast(cs, nMetas, 6);
    auto r = solveLevels(cs, nMetas);
    if (oracle) {
      ++satisfiable;
      REQUIRE(std::holds_alternative<Assignment>(r));
      const auto& asg = std::get<Assignment>(r);
      REQUIRE(asg == *oracle);           // pointwise-least agreement
      REQUIRE(checkAssignment(cs, asg)); // soundness

      // monotonicity: a satisfiable extension never lowers a solution
      std::vector<Constraint> more = cs;
      more.push_back(Constraint{Constraint::Kind::LE, randExpr(nMetas), randExpr(nMetas), n()});
      auto r2 = solveLevels(more, nMetas);
      if (const auto* asg2 = std::get_if<Assignment>(&r2)) {
        for (std::uint32_t i = 0; i < nMetas; ++i) REQUIRE((*asg2)[i] >= asg[i]);
      }
    } else if (std::holds_alternative<Assignment>(r)) {
      // satisfiable only above the oracle's range; the solution must check
      // and must genuinely leave the range
      const auto& asg = std::get<Assignment>(r);
      REQUIRE(checkAssignment(cs, asg));
      Level biggest = 0;
      for (Level v : asg) biggest = std::max(biggest, v);
      REQUIRE(biggest > 6);
    }
  }
  REQUIRE(satisfiable > 300);  // the generator mostly produces solvable systems
}
