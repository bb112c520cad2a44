#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sill/lattice.hpp"
#include "sill/types.hpp"

namespace sill {

class Term;
using TermRef = std::shared_ptr<const Term>;

// Process term. Whether an action is a right rule (on the offered channel) or
// a left rule is decided by comparing the subject with the offered variable.
class Term {
 public:
  enum class Kind : std::uint8_t { close, wait, select, cases, send, recv, fwd, spawn };

  Kind kind = Kind::close;
  SourcePos pos;
  // close x, wait x, x.l, case x, send w x (carrier), recv (carrier), fwd x y (offer)
  std::string chan;
  // send: payload w; recv: bound z; fwd: source y; spawn: new channel
  std::string other;
  std::string label;
  std::vector<std::pair<std::string, TermRef>> branches;
  TermRef cont;

  TypeRef spawn_type;
  SecTerm spawn_max;
  SecTerm spawn_run;
  std::string callee;
  std::vector<std::string> args;

  // Filled in by finalize().
  std::uint64_t hash = 0;
  std::vector<std::string> free_chans;
  std::vector<std::string> free_secvars;

  static TermRef finalize(Term t);
  TermRef branch(const std::string& l) const;
};

bool term_equal(const Term& a, const Term& b);

struct ChannelDecl {
  std::string name;
  TypeRef type;
  SecTerm sec;
  SourcePos pos;
};

struct ProcDef {
  std::string name;
  SourcePos pos;
  ExtendedLattice psi;
  std::vector<ChannelDecl> ctx;
  ChannelDecl offered;
  SecTerm running;
  TermRef body;
};

enum class Part : std::uint8_t { below, program, above };

struct ConfigArg {
  std::string name;
  // Present when the argument is a dangling interface channel.
  std::optional<ChannelDecl> dangling;
  SourcePos pos;
};

struct ConfigLine {
  Part part = Part::program;
  ChannelDecl chan;
  std::string callee;
  SecTerm run;
  std::vector<ConfigArg> args;
  SourcePos pos;
};

struct ConfigDecl {
  std::string name;
  SourcePos pos;
  std::vector<ConfigLine> lines;
};

struct Signature {
  std::shared_ptr<const SecurityLattice> lattice = std::make_shared<const SecurityLattice>();
  std::vector<std::string> level_decls;
  std::vector<std::pair<std::string, std::string>> order_decls;
  TypeTable types;
  std::map<std::string, ProcDef> procs;
  std::vector<std::string> proc_order;

  const ProcDef* find_proc(const std::string& n) const {
    auto it = procs.find(n);
    return it == procs.end() ? nullptr : &it->second;
  }
};

struct Program {
  Signature sig;
  std::vector<ConfigDecl> configs;

  const ConfigDecl* find_config(const std::string& n) const {
    for (const auto& c : configs)
      if (c.name == n) return &c;
    return nullptr;
  }
};

}  // namespace sill
