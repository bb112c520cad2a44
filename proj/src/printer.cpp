#include "sill/printer.hpp"

#include <sstream>

namespace sill {

namespace {

bool is_binary(const SessionType& t) {
  return t.kind() == SessionType::Kind::tensor || t.kind() == SessionType::Kind::lolli;
}

std::string pad(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

std::string decl(const ChannelDecl& d, const SecurityLattice& l) {
  return d.name + ": " + pretty_print(*d.type) + "[" + pretty_print(d.sec, l) + "]";
}

bool is_tail_call(const Term& t) {
  return t.kind == Term::Kind::spawn && t.cont && t.cont->kind == Term::Kind::fwd &&
         t.cont->other == t.other && t.other == t.cont->chan + "$";
}

std::string spawn_head(const Term& t, const std::string& chan, const SecurityLattice& l) {
  std::string out = chan + ": " + pretty_print(*t.spawn_type) + "[" + pretty_print(t.spawn_max, l) + "] <- " +
                    t.callee + " @ " + pretty_print(t.spawn_run, l) + " <- (";
  for (std::size_t i = 0; i < t.args.size(); ++i) out += (i ? ", " : "") + t.args[i];
  return out + ")";
}

}  // namespace

std::string pretty_print(const SessionType& t) {
  switch (t.kind()) {
    case SessionType::Kind::one:
      return "1";
    case SessionType::Kind::named:
      return t.name();
    case SessionType::Kind::plus:
    case SessionType::Kind::with: {
      std::string out = t.kind() == SessionType::Kind::plus ? "+{" : "&{";
      for (std::size_t i = 0; i < t.branches().size(); ++i) {
        if (i) out += ", ";
        out += t.branches()[i].first + ": " + pretty_print(*t.branches()[i].second);
      }
      return out + "}";
    }
    default: {
      std::string left = pretty_print(*t.payload());
      if (is_binary(*t.payload())) left = "(" + left + ")";
      return left + (t.kind() == SessionType::Kind::tensor ? " * " : " -o ") + pretty_print(*t.cont());
    }
  }
}

std::string pretty_print(const SecTerm& t, const SecurityLattice& l) {
  switch (t.kind()) {
    case SecTerm::Kind::literal:
      return l.name(t.level());
    case SecTerm::Kind::variable:
      return t.name();
    default: {
      std::string out;
      for (std::size_t i = 0; i < t.operands().size(); ++i) {
        const auto& op = t.operands()[i];
        if (i) out += t.kind() == SecTerm::Kind::join ? " \\/ " : " /\\ ";
        bool nested = !op.operands().empty();
        out += nested ? "(" + pretty_print(op, l) + ")" : pretty_print(op, l);
      }
      return out;
    }
  }
}

std::string pretty_print(const Term& t, const SecurityLattice& l, int indent) {
  const std::string p = pad(indent);
  switch (t.kind) {
    case Term::Kind::close:
      return p + "close " + t.chan;
    case Term::Kind::wait:
      return p + "wait " + t.chan + ";\n" + pretty_print(*t.cont, l, indent);
    case Term::Kind::select:
      return p + t.chan + "." + t.label + ";\n" + pretty_print(*t.cont, l, indent);
    case Term::Kind::send:
      return p + "send " + t.other + " " + t.chan + ";\n" + pretty_print(*t.cont, l, indent);
    case Term::Kind::recv:
      return p + t.other + " <- recv " + t.chan + ";\n" + pretty_print(*t.cont, l, indent);
    case Term::Kind::fwd:
      return p + "fwd " + t.chan + " " + t.other;
    case Term::Kind::cases: {
      std::string out = p + "case " + t.chan + " (";
      for (std::size_t i = 0; i < t.branches.size(); ++i) {
        out += "\n" + p + (i ? "| " : "  ") + t.branches[i].first + " =>\n";
        out += pretty_print(*t.branches[i].second, l, indent + 2);
      }
      return out + "\n" + p + ")";
    }
    case Term::Kind::spawn:
      if (is_tail_call(t)) return p + spawn_head(t, t.cont->chan, l);
      return p + spawn_head(t, t.other, l) + ";\n" + pretty_print(*t.cont, l, indent);
  }
  return {};
}

std::string pretty_print(const Signature& s) {
  const auto& l = *s.lattice;
  std::ostringstream os;
  if (!s.level_decls.empty()) {
    os << "level ";
    for (std::size_t i = 0; i < s.level_decls.size(); ++i) os << (i ? ", " : "") << s.level_decls[i];
    os << ";\n";
  }
  for (const auto& [a, b] : s.order_decls) os << "order " << a << " <= " << b << ";\n";
  if (!s.level_decls.empty()) os << "\n";
  for (const auto& n : s.types.order()) os << "type " << n << " = " << pretty_print(*s.types.lookup(n)) << "\n";
  if (!s.types.order().empty()) os << "\n";
  for (const auto& n : s.proc_order) {
    const auto& d = s.procs.at(n);
    os << "proc " << d.name << " [";
    for (std::size_t i = 0; i < d.psi.constraints.size(); ++i) {
      const auto& c = d.psi.constraints[i];
      os << (i ? ", " : "") << pretty_print(c.lhs, l) << " <= " << pretty_print(c.rhs, l);
    }
    os << "] (";
    for (std::size_t i = 0; i < d.ctx.size(); ++i) os << (i ? ", " : "") << decl(d.ctx[i], l);
    os << ") @ " << pretty_print(d.running, l) << " :: " << decl(d.offered, l) << " =\n";
    os << pretty_print(*d.body, l, 1) << "\n\n";
  }
  return os.str();
}

std::string pretty_print(const Program& p) {
  const auto& l = *p.sig.lattice;
  std::string out = pretty_print(p.sig);
  for (const auto& c : p.configs) {
    out += "config " + c.name + " {\n";
    for (const auto& line : c.lines) {
      out += "  ";
      if (line.part == Part::below) out += "below ";
      if (line.part == Part::above) out += "above ";
      out += decl(line.chan, l) + " <- " + line.callee + " @ " + pretty_print(line.run, l) + " <- (";
      for (std::size_t i = 0; i < line.args.size(); ++i) {
        const auto& a = line.args[i];
        out += (i ? ", " : "") + (a.dangling ? decl(*a.dangling, l) : a.name);
      }
      out += ");\n";
    }
    out += "}\n\n";
  }
  return out;
}

namespace {

nlohmann::json pos_json(SourcePos p) { return {{"line", p.line}, {"col", p.col}}; }

nlohmann::json type_json(const SessionType& t) {
  nlohmann::json j;
  j["kind"] = kind_name(t.kind());
  j["pos"] = pos_json(t.pos());
  switch (t.kind()) {
    case SessionType::Kind::named:
      j["name"] = t.name();
      break;
    case SessionType::Kind::plus:
    case SessionType::Kind::with:
      for (const auto& [l, b] : t.branches()) j["branches"].push_back({{"label", l}, {"type", type_json(*b)}});
      break;
    case SessionType::Kind::tensor:
    case SessionType::Kind::lolli:
      j["children"] = {type_json(*t.payload()), type_json(*t.cont())};
      break;
    default:
      break;
  }
  return j;
}

const char* term_kind(Term::Kind k) {
  switch (k) {
    case Term::Kind::close: return "close";
    case Term::Kind::wait: return "wait";
    case Term::Kind::select: return "select";
    case Term::Kind::cases: return "case";
    case Term::Kind::send: return "send";
    case Term::Kind::recv: return "recv";
    case Term::Kind::fwd: return "fwd";
    case Term::Kind::spawn: return "spawn";
  }
  return "?";
}

nlohmann::json term_json(const Term& t, const SecurityLattice& l) {
  nlohmann::json j;
  j["kind"] = term_kind(t.kind);
  j["pos"] = pos_json(t.pos);
  j["chan"] = t.chan;
  if (!t.other.empty()) j["other"] = t.other;
  if (!t.label.empty()) j["label"] = t.label;
  if (t.kind == Term::Kind::spawn) {
    j["type"] = type_json(*t.spawn_type);
    j["max"] = pretty_print(t.spawn_max, l);
    j["run"] = pretty_print(t.spawn_run, l);
    j["callee"] = t.callee;
    j["args"] = t.args;
  }
  for (const auto& [lab, b] : t.branches) j["branches"].push_back({{"label", lab}, {"body", term_json(*b, l)}});
  if (t.cont) j["children"] = {term_json(*t.cont, l)};
  return j;
}

nlohmann::json decl_json(const ChannelDecl& d, const SecurityLattice& l) {
  return {{"name", d.name}, {"type", type_json(*d.type)}, {"sec", pretty_print(d.sec, l)}, {"pos", pos_json(d.pos)}};
}

bool decl_equal(const ChannelDecl& a, const ChannelDecl& b) {
  return a.name == b.name && a.sec == b.sec && syntactic_equal(*a.type, *b.type);
}

}  // namespace

nlohmann::json ast_json(const Program& p) {
  const auto& l = *p.sig.lattice;
  nlohmann::json j;
  j["kind"] = "program";
  j["levels"] = p.sig.level_decls;
  for (const auto& [a, b] : p.sig.order_decls) j["order"].push_back({a, b});
  for (const auto& n : p.sig.types.order())
    j["types"].push_back({{"kind", "typedef"}, {"name", n}, {"body", type_json(*p.sig.types.lookup(n))}});
  for (const auto& n : p.sig.proc_order) {
    const auto& d = p.sig.procs.at(n);
    nlohmann::json pj;
    pj["kind"] = "proc";
    pj["name"] = d.name;
    pj["pos"] = pos_json(d.pos);
    pj["vars"] = d.psi.vars;
    for (const auto& c : d.psi.constraints) pj["constraints"].push_back({pretty_print(c.lhs, l), pretty_print(c.rhs, l)});
    pj["ctx"] = nlohmann::json::array();
    for (const auto& c : d.ctx) pj["ctx"].push_back(decl_json(c, l));
    pj["offered"] = decl_json(d.offered, l);
    pj["running"] = pretty_print(d.running, l);
    pj["body"] = term_json(*d.body, l);
    j["procs"].push_back(pj);
  }
  for (const auto& c : p.configs) {
    nlohmann::json cj;
    cj["kind"] = "config";
    cj["name"] = c.name;
    cj["pos"] = pos_json(c.pos);
    for (const auto& line : c.lines) {
      nlohmann::json lj;
      lj["part"] = line.part == Part::below ? "below" : line.part == Part::above ? "above" : "program";
      lj["chan"] = decl_json(line.chan, l);
      lj["callee"] = line.callee;
      lj["run"] = pretty_print(line.run, l);
      lj["pos"] = pos_json(line.pos);
      for (const auto& a : line.args) lj["args"].push_back(a.dangling ? decl_json(*a.dangling, l) : nlohmann::json(a.name));
      cj["lines"].push_back(lj);
    }
    j["configs"].push_back(cj);
  }
  return j;
}

bool program_equal(const Program& a, const Program& b) {
  const auto& sa = a.sig;
  const auto& sb = b.sig;
  if (sa.level_decls != sb.level_decls || sa.order_decls != sb.order_decls) return false;
  if (sa.types.order() != sb.types.order() || sa.proc_order != sb.proc_order) return false;
  for (const auto& n : sa.types.order())
    if (!syntactic_equal(*sa.types.lookup(n), *sb.types.lookup(n))) return false;
  for (const auto& n : sa.proc_order) {
    const auto& x = sa.procs.at(n);
    const auto& y = sb.procs.at(n);
    if (x.psi.vars != y.psi.vars || !(x.psi.constraints == y.psi.constraints)) return false;
    if (x.ctx.size() != y.ctx.size()) return false;
    for (std::size_t i = 0; i < x.ctx.size(); ++i)
      if (!decl_equal(x.ctx[i], y.ctx[i])) return false;
    if (!decl_equal(x.offered, y.offered) || !(x.running == y.running)) return false;
    if (!term_equal(*x.body, *y.body)) return false;
  }
  if (a.configs.size() != b.configs.size()) return false;
  for (std::size_t i = 0; i < a.configs.size(); ++i) {
    const auto& x = a.configs[i];
    const auto& y = b.configs[i];
    if (x.name != y.name || x.lines.size() != y.lines.size()) return false;
    for (std::size_t k = 0; k < x.lines.size(); ++k) {
      const auto& lx = x.lines[k];
      const auto& ly = y.lines[k];
      if (lx.part != ly.part || !decl_equal(lx.chan, ly.chan) || lx.callee != ly.callee || !(lx.run == ly.run) ||
          lx.args.size() != ly.args.size())
        return false;
      for (std::size_t m = 0; m < lx.args.size(); ++m) {
        const auto& ax = lx.args[m];
        const auto& ay = ly.args[m];
        if (ax.name != ay.name || ax.dangling.has_value() != ay.dangling.has_value()) return false;
        if (ax.dangling && !decl_equal(*ax.dangling, *ay.dangling)) return false;
      }
    }
  }
  return true;
}

}  // namespace sill
