#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "stratt/basics.hpp"

namespace stratt {

// Level constraints are difference constraints over naturals, so the least
// satisfying assignment is the longest-path solution from a virtual zero
// source; a positive cycle means unsatisfiable. O(V*E) relaxation rounds.

struct Unsat {
  std::vector<Constraint> cycle;  // a violating constraint cycle, with provenance
};

using Assignment = std::vector<Level>;  // meta id -> value
using SolveResult = std::variant<Assignment, Unsat>;

namespace detail {

struct Edge {
  std::uint32_t from;  // node 0 is the source; meta m is node m+1
  std::uint32_t to;
  std::int64_t weight;           // dist[to] >= dist[from] + weight
  const Constraint* src;         // null for the implicit >= 0 edges
};

// a <= b as edges; every shape reduces to dist[to] >= dist[from] + w.
inline void addLeEdges(std::vector<Edge>& edges, const LevelExpr& a, const LevelExpr& b,
                       const Constraint* src) {
  const std::int64_t ao = a.offset, bo = b.offset;
  if (!a.concrete() && !b.concrete()) {
    edges.push_back(Edge{a.meta + 1, b.meta + 1, ao - bo, src});
  } else if (!a.concrete()) {
    // m + ao <= bo  ==>  0 >= m + (ao - bo)
    edges.push_back(Edge{a.meta + 1, 0, ao - bo, src});
  } else if (!b.concrete()) {
    // ao <= m + bo  ==>  m >= ao - bo
    edges.push_back(Edge{0, b.meta + 1, ao - bo, src});
  } else {
    // concrete on both sides: a positive self-loop on the source iff violated
    if (ao > bo) edges.push_back(Edge{0, 0, ao - bo, src});
  }
}

}  // namespace detail

inline std::uint32_t countMetas(const std::vector<Constraint>& cs, std::uint32_t atLeast = 0) {
  std::uint32_t n = atLeast;
  for (const auto& c : cs) {
    if (!c.lhs.concrete()) n = std::max(n, c.lhs.meta + 1);
    if (!c.rhs.concrete()) n = std::max(n, c.rhs.meta + 1);
  }
  return n;
}

// Pointwise-least assignment over the naturals, or an Unsat witness cycle.
// Every metavariable is implicitly >= 0.
inline SolveResult solveLevels(const std::vector<Constraint>& cs, std::uint32_t nMetas) {
  using detail::Edge;
  nMetas = countMetas(cs, nMetas);

  std::vector<Edge> edges;
  edges.reserve(cs.size() * 2 + nMetas);
  for (std::uint32_t m = 0; m < nMetas; ++m) edges.push_back(Edge{0, m + 1, 0, nullptr});
  for (const auto& c : cs) {
    switch (c.kind) {
      case Constraint::Kind::LE:
        detail::addLeEdges(edges, c.lhs, c.rhs, &c);
        break;
      case Constraint::Kind::LT:
        detail::addLeEdges(edges, c.lhs.plus(1), c.rhs, &c);
        break;
      case Constraint::Kind::EQ:
        detail::addLeEdges(edges, c.lhs, c.rhs, &c);
        detail::addLeEdges(edges, c.rhs, c.lhs, &c);
        break;
    }
  }

  const std::uint32_t n = nMetas + 1;
  std::vector<std::int64_t> dist(n, 0);  // all nodes reachable from the source at >= 0
  std::vector<std::int32_t> parent(n, -1);

  std::uint32_t relaxedAt = n;  // sentinel: no relaxation in the final round
  for (std::uint32_t round = 0; round < n; ++round) {
    bool any = false;
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const Edge& e = edges[ei];
      if (dist[e.from] + e.weight > dist[e.to]) {
        dist[e.to] = dist[e.from] + e.weight;
        parent[e.to] = static_cast<std::int32_t>(ei);
        any = true;
        relaxedAt = e.to;
      }
    }
    if (!any) {
      Assignment asg(nMetas, 0);
      for (std::uint32_t m = 0; m < nMetas; ++m) asg[m] = static_cast<Level>(dist[m + 1]);
      return asg;
    }
  }

  // Still relaxing after n rounds: walk parents back onto the positive cycle
  // and collect its provenance.
  std::uint32_t node = relaxedAt;
  for (std::uint32_t i = 0; i < n; ++i) node = edges[parent[node]].from;
  Unsat u;
  std::uint32_t cur = node;
  do {
    const Edge& e = edges[parent[cur]];
    if (e.src) u.cycle.push_back(*e.src);
    cur = e.from;
  } while (cur != node && u.cycle.size() <= n);
  std::reverse(u.cycle.begin(), u.cycle.end());
  return u;
}

inline Level evalLevel(const LevelExpr& e, const Assignment& asg) {
  if (e.concrete()) return e.value();
  if (e.meta >= asg.size()) throw std::logic_error("evalLevel: unknown metavariable");
  return asg[e.meta] + e.offset;
}

// Evaluates every constraint under asg; the oracle side of the solver tests.
inline bool checkAssignment(const std::vector<Constraint>& cs, const Assignment& asg) {
  for (const auto& c : cs) {
    const Level l = evalLevel(c.lhs, asg);
    const Level r = evalLevel(c.rhs, asg);
    switch (c.kind) {
      case Constraint::Kind::LE:
        if (!(l <= r)) return false;
        break;
      case Constraint::Kind::LT:
        if (!(l < r)) return false;
        break;
      case Constraint::Kind::EQ:
        if (l != r) return false;
        break;
    }
  }
  return true;
}

}  // namespace stratt
