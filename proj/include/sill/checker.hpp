#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sill/ast.hpp"

namespace sill {

class TypeError : public std::runtime_error {
 public:
  enum class Kind {
    linearity,
    constraint_unentailed,
    type_mismatch,
    tree_invariant,
    spawn_substitution,
    signature,
    configuration
  };

  TypeError(Kind kind, SourcePos pos, const std::string& msg, std::optional<Constraint> c = std::nullopt,
            std::string constraint_text = {}, std::string concrete_text = {})
      : std::runtime_error(msg),
        kind_(kind),
        pos_(pos),
        constraint_(std::move(c)),
        constraint_text_(std::move(constraint_text)),
        concrete_text_(std::move(concrete_text)) {}

  Kind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  const std::optional<Constraint>& constraint() const { return constraint_; }
  // "t1 ⊑ t2" over the source terms, and the same with both sides pinned to
  // levels when the lattice determines them.
  const std::string& constraint_text() const { return constraint_text_; }
  const std::string& concrete_text() const { return concrete_text_; }

  // file:line:col: kind: message (constraint: t1 ⊑ t2)
  std::string render(std::string_view file) const;

 private:
  Kind kind_;
  SourcePos pos_;
  std::optional<Constraint> constraint_;
  std::string constraint_text_;
  std::string concrete_text_;
};

const char* kind_name(TypeError::Kind k);

struct CtxEntry {
  TypeRef type;
  SecTerm sec;
};
using TypingCtx = std::map<std::string, CtxEntry>;

struct Offer {
  std::string name;
  TypeRef type;
  SecTerm sec;
};

std::optional<TypeError> check_process(const Signature& sig, const ExtendedLattice& psi, const TypingCtx& ctx,
                                       const Term& p, const SecTerm& run, const Offer& offer);

// Reconstructs the callee substitution of a spawn term by matching and checks
// the spawn premises. ctx holds the argument channels; run and offer_max are
// the caller's running secrecy and maximal secrecy.
std::variant<Substitution, TypeError> infer_spawn_subst(const Signature& sig, const ExtendedLattice& psi,
                                                        const TypingCtx& ctx, const Term& spawn,
                                                        const SecTerm& run, const SecTerm& offer_max);

// First-order matching of callee annotations against caller terms. The callee
// side must be variables or literals; repeated variables must agree under eq.
struct MatchFailure {
  std::string message;
};
template <class Eq>
std::variant<Substitution, MatchFailure> match_callee(const ProcDef& callee, const std::vector<SecTerm>& arg_secs,
                                                      const SecTerm& max, const SecTerm& run, Eq eq);

std::optional<TypeError> check_definition(const Signature& sig, const ProcDef& def);
std::optional<TypeError> check_signature(const Signature& sig);

struct Configuration;
class ChannelTable;

// Forest typing of a runtime configuration against its interface.
std::optional<TypeError> check_config(const Signature& sig, const ChannelTable& chans, const Configuration& c);

// ---- template implementation

template <class Eq>
std::variant<Substitution, MatchFailure> match_callee(const ProcDef& callee, const std::vector<SecTerm>& arg_secs,
                                                      const SecTerm& max, const SecTerm& run, Eq eq) {
  Substitution g;
  std::optional<MatchFailure> fail;
  auto bind = [&](const SecTerm& pat, const SecTerm& t, const std::string& what) {
    if (fail) return;
    if (pat.is_variable()) {
      auto it = g.map.find(pat.name());
      if (it == g.map.end()) {
        g.map.emplace(pat.name(), t);
      } else if (!eq(it->second, t)) {
        fail = MatchFailure{"secrecy variable `" + pat.name() + "` of `" + callee.name + "` is matched twice (" +
                            what + ") with different secrecies"};
      }
    } else if (pat.is_literal()) {
      if (!eq(pat, t)) fail = MatchFailure{"the " + what + " of `" + callee.name + "` is a fixed level that does not match"};
    } else {
      fail = MatchFailure{"the " + what + " of `" + callee.name + "` is a compound secrecy term; only variables and levels can be matched"};
    }
  };
  for (std::size_t i = 0; i < callee.ctx.size() && i < arg_secs.size(); ++i)
    bind(callee.ctx[i].sec, arg_secs[i], "secrecy of parameter `" + callee.ctx[i].name + "`");
  bind(callee.offered.sec, max, "maximal secrecy");
  bind(callee.running, run, "running secrecy");
  if (fail) return *fail;
  for (const auto& v : callee.psi.vars)
    if (!g.binds(v))
      return MatchFailure{"secrecy variable `" + v + "` of `" + callee.name + "` is not determined by the call"};
  return g;
}

}  // namespace sill
