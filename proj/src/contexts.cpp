#include <set>
#include <sstream>

#include "sill/ni.hpp"
#include "sill/parser.hpp"
#include "sill/printer.hpp"

namespace sill {

namespace {

using SK = SessionType::Kind;

// Emits context processes at a single secrecy level. Randomness picks the
// labels; once the budget is spent, recursive types fall back to one fixed
// definition per (type, level).
class Gen {
 public:
  Gen(const Program& p, std::mt19937_64& rng) : p_(p), rng_(rng) {}

  std::string provider(const TypeRef& t, const std::string& l, int b) {
    if (t->kind() == SK::named && b <= 0) return def_provider(t->name(), l);
    std::string name = "ctx_p" + std::to_string(count_++);
    std::string body = prov(t, "x", l, b);
    procs_ << "proc " << name << " [] () @" << l << " :: x: " << pretty_print(*t) << "[" << l << "] =\n  " << body
           << "\n\n";
    return name;
  }

  std::string client(const TypeRef& t, const std::string& l, int b) {
    if (t->kind() == SK::named && b <= 0) return def_client(t->name(), l);
    std::string name = "ctx_c" + std::to_string(count_++);
    std::string body = cli(t, "a", "z", l, b);
    procs_ << "proc " << name << " [] (a: " << pretty_print(*t) << "[" << l << "]) @" << l << " :: z: 1[" << l
           << "] =\n  " << body << "\n\n";
    return name;
  }

  std::string text() const { return procs_.str(); }

 private:
  std::string fresh(const char* prefix) { return prefix + std::to_string(count_++); }

  const std::pair<std::string, TypeRef>& pick(const TypeRef& t) {
    const auto& bs = t->branches();
    return bs[std::uniform_int_distribution<std::size_t>(0, bs.size() - 1)(rng_)];
  }

  std::string def_provider(const std::string& n, const std::string& l) {
    std::string name = "ctx_def_" + n + "_" + l;
    if (done_.insert(name).second) {
      std::string body = prov(unfold(p_.sig.types, SessionType::named(n)), "x", l, 0);
      procs_ << "proc " << name << " [] () @" << l << " :: x: " << n << "[" << l << "] =\n  " << body << "\n\n";
    }
    return name;
  }

  std::string def_client(const std::string& n, const std::string& l) {
    std::string name = "ctx_use_" + n + "_" + l;
    if (done_.insert(name).second) {
      std::string body = cli(unfold(p_.sig.types, SessionType::named(n)), "a", "z", l, 0);
      procs_ << "proc " << name << " [] (a: " << n << "[" << l << "]) @" << l << " :: z: 1[" << l << "] =\n  "
             << body << "\n\n";
    }
    return name;
  }

  std::string ty(const TypeRef& t, const std::string& l) { return pretty_print(*t) + "[" + l + "]"; }

  // Provides x: t, then stops or recurses.
  std::string prov(TypeRef t, const std::string& x, const std::string& l, int b) {
    if (t->kind() == SK::named) {
      if (b <= 0) return x + ": " + ty(t, l) + " <- " + def_provider(t->name(), l) + " @" + l + " <- ()";
      return prov(unfold(p_.sig.types, t), x, l, b - 1);
    }
    switch (t->kind()) {
      case SK::one:
        return "close " + x;
      case SK::plus: {
        const auto& [lab, next] = pick(t);
        return x + "." + lab + "; " + prov(next, x, l, b);
      }
      case SK::with: {
        std::string out = "case " + x + " (";
        bool first = true;
        for (const auto& [lab, next] : t->branches()) {
          out += (first ? "" : " | ") + lab + " => " + prov(next, x, l, b);
          first = false;
        }
        return out + ")";
      }
      case SK::tensor: {
        std::string a = fresh("a");
        std::string src = provider(t->payload(), l, b - 1);
        return a + ": " + ty(t->payload(), l) + " <- " + src + " @" + l + " <- (); send " + a + " " + x + "; " +
               prov(t->cont(), x, l, b);
      }
      case SK::lolli: {
        std::string a = fresh("a"), z = fresh("z");
        std::string use = client(t->payload(), l, b - 1);
        return a + " <- recv " + x + "; " + z + ": 1[" + l + "] <- " + use + " @" + l + " <- (" + a + "); wait " + z +
               "; " + prov(t->cont(), x, l, b);
      }
      default:
        throw RuntimeError("cannot generate a provider");
    }
  }

  // Uses a: t, then closes z.
  std::string cli(TypeRef t, const std::string& a, const std::string& z, const std::string& l, int b) {
    if (t->kind() == SK::named) {
      if (b <= 0) return z + ": 1[" + l + "] <- " + def_client(t->name(), l) + " @" + l + " <- (" + a + ")";
      return cli(unfold(p_.sig.types, t), a, z, l, b - 1);
    }
    switch (t->kind()) {
      case SK::one:
        return "wait " + a + "; close " + z;
      case SK::plus: {
        std::string out = "case " + a + " (";
        bool first = true;
        for (const auto& [lab, next] : t->branches()) {
          out += (first ? "" : " | ") + lab + " => " + cli(next, a, z, l, b);
          first = false;
        }
        return out + ")";
      }
      case SK::with: {
        const auto& [lab, next] = pick(t);
        return a + "." + lab + "; " + cli(next, a, z, l, b);
      }
      case SK::tensor: {
        std::string w = fresh("w"), v = fresh("v");
        std::string use = client(t->payload(), l, b - 1);
        return w + " <- recv " + a + "; " + v + ": 1[" + l + "] <- " + use + " @" + l + " <- (" + w + "); wait " + v +
               "; " + cli(t->cont(), a, z, l, b);
      }
      case SK::lolli: {
        std::string w = fresh("w");
        std::string src = provider(t->payload(), l, b - 1);
        return w + ": " + ty(t->payload(), l) + " <- " + src + " @" + l + " <- (); send " + w + " " + a + "; " +
               cli(t->cont(), a, z, l, b);
      }
      default:
        throw RuntimeError("cannot generate a client");
    }
  }

  const Program& p_;
  std::mt19937_64& rng_;
  std::ostringstream procs_;
  std::set<std::string> done_;
  int count_ = 0;
};

}  // namespace

std::string random_context(const Program& p, const std::string& config, const std::string& name,
                           std::mt19937_64& rng, int budget) {
  const ConfigDecl* cfg = p.find_config(config);
  if (!cfg) throw RuntimeError("no configuration named `" + config + "`");
  const auto& lat = *p.sig.lattice;
  std::map<std::string, const ConfigLine*> by_chan;
  for (const auto& line : cfg->lines) by_chan[line.chan.name] = &line;
  auto part_of = [&](const std::string& ch) -> std::optional<Part> {
    auto it = by_chan.find(ch);
    if (it == by_chan.end()) return std::nullopt;
    return it->second->part;
  };
  auto lvl = [&](const SecTerm& s) { return pretty_print(s, lat); };

  Gen g(p, rng);
  std::ostringstream lines;
  std::set<std::string> served;
  for (const auto& line : cfg->lines) {
    if (line.part != Part::program) continue;
    for (const auto& a : line.args) {
      if (a.dangling || part_of(a.name) != Part::below || !served.insert(a.name).second) continue;
      const auto& d = by_chan.at(a.name)->chan;
      std::string l = lvl(d.sec);
      lines << "  below " << d.name << ": " << pretty_print(*d.type) << "[" << l << "] <- "
            << g.provider(d.type, l, budget) << " @" << l << " <- ();\n";
    }
  }
  for (const auto& line : cfg->lines) {
    if (line.part != Part::program) continue;
    lines << "  " << line.chan.name << ": " << pretty_print(*line.chan.type) << "[" << lvl(line.chan.sec) << "] <- "
          << line.callee << " @" << lvl(line.run) << " <- (";
    for (std::size_t i = 0; i < line.args.size(); ++i) {
      const auto& a = line.args[i];
      lines << (i ? ", " : "") << a.name;
      if (a.dangling) lines << ": " << pretty_print(*a.dangling->type) << "[" << lvl(a.dangling->sec) << "]";
    }
    lines << ");\n";
  }
  int k = 0;
  for (const auto& line : cfg->lines) {
    if (line.part != Part::above) continue;
    for (const auto& a : line.args) {
      if (a.dangling || part_of(a.name) != Part::program) continue;
      const auto& d = by_chan.at(a.name)->chan;
      std::string l = lvl(d.sec);
      lines << "  above ctx_top" << k++ << ": 1[" << l << "] <- " << g.client(d.type, l, budget) << " @" << l
            << " <- (" << a.name << ");\n";
    }
  }
  return g.text() + "config " + name + " {\n" + lines.str() + "}\n";
}

Program extend_program(const Program& p, const std::string& extra) {
  return parse_program(pretty_print(p) + "\n" + extra);
}

}  // namespace sill
