#include "sill/security.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace sill {

std::vector<InterfaceChan> project_ctx(const std::vector<InterfaceChan>& delta, const ChannelTable& chans,
                                       const SecurityLattice& lat, SecLevel xi) {
  std::vector<InterfaceChan> out;
  for (const auto& d : delta)
    if (lat.leq(chans.maxsec(d.chan), xi)) out.push_back(d);
  return out;
}

std::vector<Chan> touched(const Node& n) {
  std::vector<Chan> out{n.provides()};
  for (auto u : n.uses()) out.push_back(u);
  return out;
}

namespace {

bool receiving(const Term& t) {
  return t.kind == Term::Kind::wait || t.kind == Term::Kind::cases || t.kind == Term::Kind::recv;
}

}  // namespace

std::vector<SecLevel> quasi_secrecy(const Runtime& rt, const Configuration& c) {
  const auto& lat = rt.lattice();
  const auto& chans = rt.chans();
  const std::size_t n = c.nodes.size();
  std::map<Chan, std::size_t> client;
  for (std::size_t i = 0; i < n; ++i)
    for (auto u : c.nodes[i].uses()) client[u] = i;
  std::vector<SecLevel> q(n);
  std::vector<int> state(n, 0);
  std::function<SecLevel(std::size_t)> go = [&](std::size_t i) -> SecLevel {
    if (state[i] == 2) return q[i];
    const Node& x = c.nodes[i];
    SecLevel r;
    if (x.is_proc()) {
      r = x.run;
      if (receiving(*x.term)) {
        auto ch = x.term->chan == x.offer_var ? x.offer : *x.lookup(x.term->chan);
        r = lat.join(r, chans.maxsec(ch));
      }
    } else if (!msg_positive(x.mkind)) {
      r = chans.maxsec(x.carrier);
    } else {
      r = chans.maxsec(x.carrier);
      auto it = client.find(x.carrier);
      // A cycle cannot occur in a forest; guard anyway.
      if (it != client.end() && state[it->second] != 1) {
        state[i] = 1;
        r = lat.join(go(it->second), r);
      }
    }
    q[i] = r;
    state[i] = 2;
    return r;
  };
  for (std::size_t i = 0; i < n; ++i) go(i);
  return q;
}

ProjectedConfig relevant_nodes(const Runtime& rt, const Configuration& c, SecLevel xi) {
  std::vector<Chan> iface;
  for (const auto& u : c.uses) iface.push_back(u.chan);
  for (const auto& p : c.provides) iface.push_back(p.chan);
  // Channels between the program and its context count as interface too.
  std::map<Chan, Part> prov;
  for (const auto& n : c.nodes) prov[n.provides()] = n.part;
  for (const auto& n : c.nodes)
    for (auto u : n.uses()) {
      auto it = prov.find(u);
      if (it != prov.end() && (it->second == Part::program) != (n.part == Part::program)) iface.push_back(u);
    }
  return relevant_nodes(rt, c, xi, iface);
}

ProjectedConfig relevant_nodes(const Runtime& rt, const Configuration& c, SecLevel xi,
                               const std::vector<Chan>& interface) {
  const auto& lat = rt.lattice();
  const auto& chans = rt.chans();
  auto low = [&](Chan ch) { return lat.leq(chans.maxsec(ch), xi); };
  auto q = quasi_secrecy(rt, c);
  std::set<Chan> rel;
  for (auto ch : interface)
    if (low(ch)) rel.insert(ch);
  std::vector<bool> in(c.nodes.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      if (in[i] || c.nodes[i].part != Part::program || !lat.leq(q[i], xi)) continue;
      auto ts = touched(c.nodes[i]);
      if (std::none_of(ts.begin(), ts.end(), [&](Chan ch) { return rel.count(ch) != 0; })) continue;
      in[i] = changed = true;
      for (auto ch : ts)
        if (low(ch)) rel.insert(ch);
    }
  }
  ProjectedConfig p;
  for (std::size_t i = 0; i < c.nodes.size(); ++i)
    if (in[i]) {
      p.nodes.push_back(i);
      p.quasi.push_back(q[i]);
    }
  p.channels.assign(rel.begin(), rel.end());
  return p;
}

namespace {

// Channel slots of a node in a fixed order.
std::vector<Chan> slots(const Node& n) {
  if (n.is_proc()) {
    std::vector<Chan> out;
    for (const auto& [v, ch] : n.env) out.push_back(ch);
    return out;
  }
  switch (n.mkind) {
    case MsgKind::close:
      return {n.carrier};
    case MsgKind::label_pos:
    case MsgKind::label_neg:
      return {n.carrier, n.cont};
    default:
      return {n.carrier, n.cont, n.payload};
  }
}

// Node content with channels left out.
bool shape_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.part != b.part) return false;
  if (a.is_proc()) {
    if (a.offer_var != b.offer_var || a.run != b.run || a.gamma != b.gamma || a.env.size() != b.env.size())
      return false;
    for (std::size_t i = 0; i < a.env.size(); ++i)
      if (a.env[i].first != b.env[i].first) return false;
    return a.term == b.term || term_equal(*a.term, *b.term);
  }
  return a.mkind == b.mkind && a.label == b.label;
}

struct Renamer {
  std::map<std::uint32_t, std::pair<std::uint32_t, std::int64_t>> fwd;
  std::map<std::uint32_t, std::pair<std::uint32_t, std::int64_t>> bwd;

  bool bind(Chan a, Chan b) {
    std::int64_t d = static_cast<std::int64_t>(b.gen) - static_cast<std::int64_t>(a.gen);
    auto f = fwd.find(a.base);
    if (f != fwd.end()) return f->second == std::pair{b.base, d};
    auto g = bwd.find(b.base);
    if (g != bwd.end()) return g->second == std::pair{a.base, -d};
    fwd[a.base] = {b.base, d};
    bwd[b.base] = {a.base, -d};
    return true;
  }
};

}  // namespace

bool proj_eq(const Runtime& rt1, const Configuration& d1, const Runtime& rt2, const Configuration& d2, SecLevel xi) {
  auto p1 = relevant_nodes(rt1, d1, xi);
  auto p2 = relevant_nodes(rt2, d2, xi);
  if (p1.nodes.size() != p2.nodes.size()) return false;
  if (p1.channels != p2.channels) return false;
  const auto& lat = rt1.lattice();
  auto low1 = [&](Chan ch) { return lat.leq(rt1.chans().maxsec(ch), xi); };
  auto low2 = [&](Chan ch) { return lat.leq(rt2.chans().maxsec(ch), xi); };
  const std::size_t n = p1.nodes.size();
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t, const Renamer&)> go = [&](std::size_t i, const Renamer& ren) -> bool {
    if (i == n) return true;
    const Node& a = d1.nodes[p1.nodes[i]];
    auto sa = slots(a);
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const Node& b = d2.nodes[p2.nodes[j]];
      if (p1.quasi[i] != p2.quasi[j] || !shape_equal(a, b)) continue;
      auto sb = slots(b);
      if (sa.size() != sb.size()) continue;
      Renamer r = ren;
      bool ok = true;
      for (std::size_t k = 0; k < sa.size() && ok; ++k) {
        bool la = low1(sa[k]), lb = low2(sb[k]);
        if (la != lb) ok = false;
        else if (la) ok = sa[k] == sb[k];
        else ok = rt1.chans().maxsec(sa[k]) == rt2.chans().maxsec(sb[k]) && r.bind(sa[k], sb[k]);
      }
      if (!ok) continue;
      used[j] = true;
      if (go(i + 1, r)) return true;
      used[j] = false;
    }
    return false;
  };
  return go(0, Renamer{});
}

std::string show_projection(const Runtime& rt, const Configuration& c, SecLevel xi) {
  const auto& lat = rt.lattice();
  auto p = relevant_nodes(rt, c, xi);
  auto q = quasi_secrecy(rt, c);
  std::set<std::size_t> rel(p.nodes.begin(), p.nodes.end());
  std::ostringstream os;
  os << "observer " << lat.name(xi) << "\n";
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    os << (rel.count(i) ? "* " : "  ") << "quasi " << lat.name(q[i]) << "  " << rt.show(c.nodes[i]) << "\n";
  }
  os << "relevant channels:";
  for (auto ch : p.channels) os << " " << rt.chans().display(ch);
  os << "\nchannels:";
  std::set<Chan> all;
  for (const auto& n : c.nodes)
    for (auto ch : touched(n)) all.insert(ch);
  for (auto ch : all)
    os << " " << rt.chans().display(ch) << (lat.leq(rt.chans().maxsec(ch), xi) ? " ⊑ξ" : " ⋢ξ");
  os << "\n";
  return os.str();
}

}  // namespace sill
