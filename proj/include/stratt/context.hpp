#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "stratt/term.hpp"

namespace stratt {

// --- typing contexts ---------------------------------------------------------

struct CtxEntry {
  std::string name;
  LevelExpr level;
  TermPtr type;
};

struct Context {
  std::vector<CtxEntry> entries;

  const CtxEntry* lookup(const std::string& name) const {
    for (auto it = entries.rbegin(); it != entries.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }
  void push(std::string name, LevelExpr level, TermPtr type) {
    entries.push_back(CtxEntry{std::move(name), level, std::move(type)});
  }
  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// Keeps exactly the entries with level <= k, preserving order.
inline Context restrictCtx(const Context& g, Level k) {
  Context out;
  for (const auto& e : g.entries) {
    if (e.level.concrete() && e.level.value() <= k) out.entries.push_back(e);
  }
  return out;
}

// Re-annotates entries at level exactly j to level k; types are untouched.
inline Context floatCtx(const Context& g, Level j, Level k) {
  if (j > k) throw std::invalid_argument("floatCtx: target level below source level");
  Context out = g;
  for (auto& e : out.entries) {
    if (e.level.concrete() && e.level.value() == j) e.level = LevelExpr(k);
  }
  return out;
}

// (x, k, A) becomes (x, k+i, A displaced by i).
inline Context displaceCtx(const Context& g, Level i) {
  Context out;
  for (const auto& e : g.entries)
    out.entries.push_back(CtxEntry{e.name, e.level.plus(i), displaceTerm(e.type, i)});
  return out;
}

inline Level maxCtxLevel(const Context& g) {
  Level m = 0;
  for (const auto& e : g.entries)
    if (e.level.concrete() && e.level.value() > m) m = e.level.value();
  return m;
}

// --- signatures ---------------------------------------------------------------

struct DefEntry {
  std::string name;
  LevelExpr level;
  TermPtr type;      // locally closed
  TermPtr body;      // null while only declared (recursion, postulates)
  Span span{};
};

// Datatype parameter. Fixed parameters carry a concrete annotation strictly
// below the datatype level; floating ones sit at the datatype level and may
// not be mentioned by later parameter types or the index type.
struct DataParam {
  std::string name;
  bool fixed = false;
  LevelExpr level;
  TermPtr type;  // may mention earlier params as FVars of their given names
};

struct CtorArg {
  std::string name;  // placeholder FVar name used inside the stored telescope
  bool fixed = false;
  LevelExpr level;   // fixed args: the Pi annotation (undisplaced); floating: datatype level
  TermPtr type;      // may mention params and earlier fixed args as FVars
};

struct CtorDecl {
  std::string name;
  std::vector<CtorArg> args;
  std::vector<TermPtr> indices;  // result indices; mention params and fixed args as FVars
  Span span{};
};

struct DataDecl {
  std::string name;
  LevelExpr level;
  std::vector<DataParam> params;
  TermPtr indexType;  // iterated floating arrow ending in Star; mentions params as FVars
  std::vector<CtorDecl> ctors;
  TermPtr constType;  // standalone type of the datatype head (closed)
  Span span{};
};

struct Signature {
  using Entry = std::variant<DefEntry, DataDecl>;
  std::vector<Entry> entries;

  std::unordered_map<std::string, std::size_t> byName;                  // defs and datatypes
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> ctorByName;

  bool known(const std::string& name) const {
    return byName.count(name) != 0 || ctorByName.count(name) != 0;
  }

  const DefEntry* findDef(const std::string& name) const {
    auto it = byName.find(name);
    if (it == byName.end()) return nullptr;
    return std::get_if<DefEntry>(&entries[it->second]);
  }
  DefEntry* findDef(const std::string& name) {
    auto it = byName.find(name);
    if (it == byName.end()) return nullptr;
    return std::get_if<DefEntry>(&entries[it->second]);
  }
  const DataDecl* findData(const std::string& name) const {
    auto it = byName.find(name);
    if (it == byName.end()) return nullptr;
    return std::get_if<DataDecl>(&entries[it->second]);
  }
  DataDecl* findData(const std::string& name) {
    auto it = byName.find(name);
    if (it == byName.end()) return nullptr;
    return std::get_if<DataDecl>(&entries[it->second]);
  }

  // (datatype, ctor) for a constructor name; ctor names are globally unique.
  std::pair<const DataDecl*, const CtorDecl*> findCtor(const std::string& name) const {
    auto it = ctorByName.find(name);
    if (it == ctorByName.end()) return {nullptr, nullptr};
    const DataDecl* d = std::get_if<DataDecl>(&entries[it->second.first]);
    if (!d || it->second.second >= d->ctors.size()) return {nullptr, nullptr};
    return {d, &d->ctors[it->second.second]};
  }

  void addDef(DefEntry e) {
    byName[e.name] = entries.size();
    entries.emplace_back(std::move(e));
  }
  void addData(DataDecl d) {
    std::size_t at = entries.size();
    byName[d.name] = at;
    for (std::size_t i = 0; i < d.ctors.size(); ++i) ctorByName[d.ctors[i].name] = {at, i};
    entries.emplace_back(std::move(d));
  }

  // Drops the most recent entry; used to roll back a failed declaration.
  void pop() {
    if (entries.empty()) return;
    if (const DefEntry* e = std::get_if<DefEntry>(&entries.back())) {
      byName.erase(e->name);
    } else if (const DataDecl* d = std::get_if<DataDecl>(&entries.back())) {
      byName.erase(d->name);
      for (const auto& c : d->ctors) ctorByName.erase(c.name);
    }
    entries.pop_back();
  }
};

}  // namespace stratt
