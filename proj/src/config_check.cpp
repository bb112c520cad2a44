#include <map>
#include <set>

#include "sill/checker.hpp"
#include "sill/runtime.hpp"

namespace sill {

namespace {

using K = TypeError::Kind;

TypeError bad(const std::string& msg) { return TypeError(K::configuration, {}, msg); }

}  // namespace

std::optional<TypeError> check_config(const Signature& sig, const ChannelTable& chans, const Configuration& c) {
  const auto& lat = *sig.lattice;
  const auto& types = sig.types;
  auto name = [&](Chan ch) { return chans.display(ch); };

  std::map<Chan, std::size_t> prov;
  std::map<Chan, std::size_t> cli;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    auto p = c.nodes[i].provides();
    if (!prov.emplace(p, i).second) return bad("channel " + name(p) + " is provided twice");
    for (auto u : c.nodes[i].uses())
      if (!cli.emplace(u, i).second) return bad("channel " + name(u) + " is used twice");
  }
  std::map<Chan, TypeRef> dangling;
  for (const auto& u : c.uses) {
    if (prov.count(u.chan)) return bad("interface channel " + name(u.chan) + " is provided inside the configuration");
    dangling[u.chan] = u.type;
  }
  std::set<Chan> top;
  for (const auto& p : c.provides) {
    auto it = prov.find(p.chan);
    if (it == prov.end()) return bad("offered channel " + name(p.chan) + " has no provider");
    if (cli.count(p.chan)) return bad("offered channel " + name(p.chan) + " is also used inside the configuration");
    top.insert(p.chan);
  }
  for (const auto& [ch, i] : cli)
    if (!prov.count(ch) && !dangling.count(ch))
      return bad("channel " + name(ch) + " is used but neither provided nor part of the interface");
  for (const auto& [ch, i] : prov)
    if (!cli.count(ch) && !top.count(ch)) return bad("channel " + name(ch) + " is provided but never used");
  for (const auto& [ch, t] : dangling)
    if (!cli.count(ch)) return bad("interface channel " + name(ch) + " is not used");

  auto type_of = [&](Chan ch) -> TypeRef {
    auto it = prov.find(ch);
    if (it != prov.end()) {
      const Node& n = c.nodes[it->second];
      return n.is_proc() ? n.offer_type : n.msg_type;
    }
    auto d = dangling.find(ch);
    return d == dangling.end() ? nullptr : d->second;
  };
  auto sec = [&](Chan ch) { return chans.maxsec(ch); };

  for (const auto& p : c.provides)
    if (!type_equal(types, p.type, type_of(p.chan)))
      return bad("offered channel " + name(p.chan) + " does not have its interface type");

  for (const auto& n : c.nodes) {
    if (n.is_proc()) {
      ExtendedLattice psi{sig.lattice, {}, {}};
      for (const auto& [v, l] : n.gamma) {
        psi.vars.push_back(v);
        psi.constraints.push_back({SecTerm::var(v), SecTerm::lit(l)});
        psi.constraints.push_back({SecTerm::lit(l), SecTerm::var(v)});
      }
      TypingCtx ctx;
      for (const auto& [v, ch] : n.env) {
        if (v == n.offer_var) continue;
        auto t = type_of(ch);
        if (!t) return bad("channel " + name(ch) + " has no known type");
        ctx[v] = {t, SecTerm::lit(sec(ch))};
      }
      if (!lat.leq(n.run, sec(n.offer)))
        return bad("process offering " + name(n.offer) + " runs above its maximal secrecy");
      Offer off{n.offer_var, n.offer_type, SecTerm::lit(sec(n.offer))};
      if (auto e = check_process(sig, psi, ctx, *n.term, SecTerm::lit(n.run), off))
        return TypeError(e->kind(), e->pos(),
                         "process offering " + name(n.offer) + ": " + e->what(), e->constraint(),
                         e->constraint_text(), e->concrete_text());
      continue;
    }
    const std::string what = std::string("message ") + msg_kind_name(n.mkind) + " on " + name(n.carrier);
    TypeRef carrier_t = msg_positive(n.mkind) ? n.msg_type : type_of(n.carrier);
    if (!carrier_t) return bad(what + ": carrier has no known type");
    auto h = head(types, carrier_t);
    using SK = SessionType::Kind;
    switch (n.mkind) {
      case MsgKind::close:
        if (h->kind() != SK::one) return bad(what + ": close on a channel not of type 1");
        break;
      case MsgKind::label_pos:
      case MsgKind::label_neg: {
        if (h->kind() != (n.mkind == MsgKind::label_pos ? SK::plus : SK::with))
          return bad(what + ": label on a channel of the wrong polarity");
        auto b = h->branch(n.label);
        if (!b) return bad(what + ": label `" + n.label + "` not in the protocol");
        if (!type_equal(types, b, type_of(n.cont))) return bad(what + ": continuation has the wrong type");
        break;
      }
      case MsgKind::send_pos:
      case MsgKind::send_neg: {
        if (h->kind() != (n.mkind == MsgKind::send_pos ? SK::tensor : SK::lolli))
          return bad(what + ": send on a channel of the wrong polarity");
        if (!type_equal(types, h->payload(), type_of(n.payload))) return bad(what + ": payload has the wrong type");
        if (!type_equal(types, h->cont(), type_of(n.cont))) return bad(what + ": continuation has the wrong type");
        if (sec(n.payload) != sec(n.carrier)) return bad(what + ": payload secrecy differs from the carrier");
        break;
      }
    }
    if (n.mkind != MsgKind::close && sec(n.cont) != sec(n.carrier))
      return bad(what + ": continuation secrecy differs from the carrier");
  }
  return std::nullopt;
}

}  // namespace sill
