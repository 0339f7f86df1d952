#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stratt/data.hpp"
#include "stratt/print.hpp"
#include "stratt/typer.hpp"

namespace stratt {

struct DriverOptions {
  bool noInfer = false;
  bool printLevels = false;
  bool traceConstraints = false;
  bool keepGoing = false;
  bool quiet = false;
  bool json = false;
  std::uint64_t fuel = 100000;
};

struct CheckOutcome {
  Signature sig;
  std::vector<Diagnostic> diags;
  std::vector<UnitStats> stats;
  std::vector<std::string> files;
  int exitCode = 0;  // 0 all checked, 1 type/level error, 2 parse or IO error
};

inline std::string jsonEscape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string diagnosticToJson(const Diagnostic& d, const std::vector<std::string>& files) {
  std::ostringstream os;
  std::string file = d.span.file < files.size() ? files[d.span.file] : "<input>";
  os << "{\"severity\":\"" << (d.severity == Diagnostic::Severity::Error ? "error" : "warning")
     << "\",\"code\":\"" << errorCodeName(d.code) << "\",\"file\":\"" << jsonEscape(file)
     << "\",\"line\":" << d.span.line << ",\"col\":" << d.span.col << ",\"message\":\""
     << jsonEscape(d.message) << "\",\"provenance\":[";
  for (std::size_t i = 0; i < d.provenance.size(); ++i) {
    if (i) os << ",";
    os << "\"" << jsonEscape(d.provenance[i]) << "\"";
  }
  os << "]}";
  return os.str();
}

inline std::string diagnosticToText(const Diagnostic& d, const std::vector<std::string>& files) {
  std::ostringstream os;
  os << renderSpan(d.span, &files) << ": "
     << (d.severity == Diagnostic::Severity::Error ? "error" : "warning") << "["
     << errorCodeName(d.code) << "]: " << d.message;
  for (const auto& p : d.provenance) os << "\n    | " << p;
  return os.str();
}

// Checks named sources as one program sharing a growing signature.
inline CheckOutcome checkSources(const std::vector<std::pair<std::string, std::string>>& sources,
                                 const DriverOptions& opts, std::ostream* trace = nullptr) {
  CheckOutcome out;
  for (const auto& [name, _] : sources) out.files.push_back(name);

  std::vector<SurfaceDecl> decls;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    try {
      auto part = parseProgram(sources[i].second, static_cast<std::uint32_t>(i));
      decls.insert(decls.end(), part.begin(), part.end());
    } catch (const CheckError& e) {
      out.diags.push_back(e.diag);
      out.exitCode = 2;
      return out;
    }
  }

  CheckOptions copts;
  copts.noInfer = opts.noInfer;
  copts.traceConstraints = opts.traceConstraints;
  copts.fuel = opts.fuel;
  copts.traceOut = trace;
  copts.fileNames = &out.files;

  Elaborator el(out.sig, copts);
  out.diags = el.checkProgram(decls, opts.keepGoing);
  out.stats = el.stats();
  if (!out.diags.empty()) out.exitCode = 1;
  return out;
}

inline CheckOutcome checkFiles(const std::vector<std::string>& paths, const DriverOptions& opts,
                               std::ostream* trace = nullptr) {
  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
      CheckOutcome out;
      out.files = paths;
      Diagnostic d;
      d.code = ErrorCode::Parse;
      d.message = "cannot read file: " + p;
      out.diags.push_back(std::move(d));
      out.exitCode = 2;
      return out;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    sources.emplace_back(p, buf.str());
  }
  return checkSources(sources, opts, trace);
}

// One line per checked definition: "OK <name> :^<level> <type>".
inline void printOkLines(const CheckOutcome& out, std::ostream& os) {
  for (const auto& st : out.stats) {
    if (st.name == "<recheck>") continue;
    std::string ty;
    if (const DefEntry* e = out.sig.findDef(st.name)) ty = printTerm(e->type);
    else if (const DataDecl* d = out.sig.findData(st.name)) ty = printTerm(d->constType);
    os << "OK " << st.name << " :^" << st.level << " " << ty << "\n";
  }
}

// --- reduce -----------------------------------------------------------------

inline TermPtr reduceDefinition(const Signature& sig, const std::string& name,
                                std::uint64_t fuel) {
  const DefEntry* e = sig.findDef(name);
  if (!e) fail(ErrorCode::Unbound, Span{}, "no definition named " + name);
  if (!e->body) fail(ErrorCode::Unbound, Span{}, name + " has no body to reduce");
  Fuel f;
  f.remaining = fuel;
  return Evaluator(sig, f).normalize(e->body);
}

// --- blowup benchmark ---------------------------------------------------------

// The nesting family: T1 is a 6-fold arrow over Type and each T_{i+1} is a
// 6-fold arrow over T_i; constraint counts must stay linear in depth.
inline std::string blowupProgram(std::uint32_t depth) {
  std::ostringstream os;
  for (std::uint32_t i = 1; i <= depth; ++i) {
    std::string leaf = i == 1 ? "Type" : ("T" + std::to_string(i - 1));
    os << "T" << i << " : Type\n";
    os << "T" << i << " = ";
    for (int j = 0; j < 5; ++j) os << leaf << " -> ";
    os << leaf << "\n";
  }
  return os.str();
}

struct BlowupReport {
  struct Row {
    std::string name;
    std::size_t constraints;
    std::int64_t micros;
  };
  std::vector<Row> rows;
  bool ok = false;
  std::int64_t totalMicros = 0;
};

inline BlowupReport runBlowupBench(std::uint32_t depth, const DriverOptions& opts = {}) {
  BlowupReport rep;
  auto outcome = checkSources({{"<blowup>", blowupProgram(depth)}}, opts);
  rep.ok = outcome.exitCode == 0;
  for (const auto& st : outcome.stats) {
    rep.rows.push_back({st.name, st.constraints, st.micros});
    rep.totalMicros += st.micros;
  }
  return rep;
}

// --- signature comparison (elaboration round trips) ---------------------------

inline bool dataDeclAlphaEqual(const DataDecl& a, const DataDecl& b) {
  if (a.name != b.name || !(a.level == b.level) || a.params.size() != b.params.size() ||
      a.ctors.size() != b.ctors.size())
    return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    const auto& pa = a.params[i];
    const auto& pb = b.params[i];
    if (pa.name != pb.name || pa.fixed != pb.fixed || !(pa.level == pb.level) ||
        !alphaEqual(pa.type, pb.type))
      return false;
  }
  if (!alphaEqual(a.indexType, b.indexType) || !alphaEqual(a.constType, b.constType))
    return false;
  for (std::size_t i = 0; i < a.ctors.size(); ++i) {
    const auto& ca = a.ctors[i];
    const auto& cb = b.ctors[i];
    if (ca.name != cb.name || ca.args.size() != cb.args.size() ||
        ca.indices.size() != cb.indices.size())
      return false;
    // argument placeholder names participate in stored types; compare up to
    // renaming by substituting b's names into a's frame
    std::vector<std::pair<std::string, TermPtr>> ren;
    for (std::size_t j = 0; j < ca.args.size(); ++j)
      ren.emplace_back(cb.args[j].name, mkFVar(ca.args[j].name));
    auto renamed = [&](TermPtr t) {
      for (const auto& [n, v] : ren) t = substFree(t, n, v);
      return t;
    };
    for (std::size_t j = 0; j < ca.args.size(); ++j) {
      if (ca.args[j].fixed != cb.args[j].fixed || !(ca.args[j].level == cb.args[j].level) ||
          !alphaEqual(ca.args[j].type, renamed(cb.args[j].type)))
        return false;
    }
    for (std::size_t j = 0; j < ca.indices.size(); ++j)
      if (!alphaEqual(ca.indices[j], renamed(cb.indices[j]))) return false;
  }
  return true;
}

inline bool signatureAlphaEqual(const Signature& a, const Signature& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const DefEntry* da = std::get_if<DefEntry>(&a.entries[i]);
    const DefEntry* db = std::get_if<DefEntry>(&b.entries[i]);
    if ((da == nullptr) != (db == nullptr)) return false;
    if (da) {
      if (da->name != db->name || !(da->level == db->level) || !alphaEqual(da->type, db->type))
        return false;
      if ((da->body == nullptr) != (db->body == nullptr)) return false;
      if (da->body && !alphaEqual(da->body, db->body)) return false;
    } else {
      if (!dataDeclAlphaEqual(std::get<DataDecl>(a.entries[i]), std::get<DataDecl>(b.entries[i])))
        return false;
    }
  }
  return true;
}

}  // namespace stratt
