#include "sill/harness.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>

namespace sill {

namespace {

struct Links {
  std::map<Chan, std::size_t> prov;
  std::map<Chan, std::size_t> cli;

  explicit Links(const Configuration& c) {
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      prov[c.nodes[i].provides()] = i;
      for (auto u : c.nodes[i].uses()) cli[u] = i;
    }
  }
  std::optional<std::size_t> provider(Chan ch) const {
    auto it = prov.find(ch);
    return it == prov.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }
  std::optional<std::size_t> client(Chan ch) const {
    auto it = cli.find(ch);
    return it == cli.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }
};

bool is_hidden(const Configuration& c, Chan ch) {
  for (const auto& p : c.provides)
    if (p.chan == ch) return !p.observable;
  return false;
}

// Nodes reachable from the roots by following used channels to their
// providers, staying within one part.
std::set<std::size_t> subtree(const Configuration& c, const Links& l, std::vector<std::size_t> roots, Part part) {
  std::set<std::size_t> out;
  while (!roots.empty()) {
    auto i = roots.back();
    roots.pop_back();
    if (c.nodes[i].part != part || !out.insert(i).second) continue;
    for (auto u : c.nodes[i].uses())
      if (auto p = l.provider(u)) roots.push_back(*p);
  }
  return out;
}

// Providers in `part` of the channels used by `from`, with their subtrees.
std::set<std::size_t> providers_below(const Configuration& c, const Links& l, const std::set<std::size_t>& from,
                                      Part part) {
  std::vector<std::size_t> roots;
  for (auto i : from)
    for (auto u : c.nodes[i].uses())
      if (auto p = l.provider(u); p && c.nodes[*p].part == part) roots.push_back(*p);
  return subtree(c, l, roots, part);
}

std::vector<Chan> touched_chans(const Node& n) {
  auto out = n.uses();
  out.push_back(n.provides());
  return out;
}

void move_to(Configuration& c, const std::set<std::size_t>& idx, Part part) {
  for (auto i : idx) c.nodes[i].part = part;
}

}  // namespace

bool ObsAction::operator==(const ObsAction& o) const {
  return dir == o.dir && kind == o.kind && channel == o.channel && mkind == o.mkind && label == o.label &&
         cont == o.cont && payload == o.payload && target == o.target;
}

std::string ObsAction::show(const ChannelTable& chans) const {
  std::ostringstream os;
  os << chans.display(channel) << (dir == Dir::in ? ".in " : ".out ");
  if (kind == Kind::forward) {
    os << "{" << chans.display(target) << "/" << chans.display(channel) << "}";
    return os.str();
  }
  switch (mkind) {
    case MsgKind::close:
      os << "close";
      break;
    case MsgKind::label_pos:
    case MsgKind::label_neg:
      os << label;
      break;
    case MsgKind::send_pos:
    case MsgKind::send_neg:
      os << "send " << chans.display(payload);
      break;
  }
  return os.str();
}

Configuration Harness::normalize(Configuration s) const {
  const auto& lat = rt_.lattice();
  auto high = [&](Chan ch) { return !lat.leq(rt_.chans().maxsec(ch), opt_.xi); };
  for (auto& p : s.provides)
    if (high(p.chan)) p.observable = false;
  for (bool changed = true; changed;) {
    changed = false;
    Links l(s);
    for (const auto& [ch, pi] : l.prov) {
      auto ci = l.client(ch);
      if (!ci || !high(ch)) continue;
      Part pp = s.nodes[pi].part, cp = s.nodes[*ci].part;
      if (pp == cp || (pp != Part::program && cp != Part::program)) continue;
      std::size_t start = pp == Part::program ? *ci : pi;
      Part side = s.nodes[start].part;
      // Connected component of the context side.
      std::set<std::size_t> comp;
      std::vector<std::size_t> todo{start};
      while (!todo.empty()) {
        auto i = todo.back();
        todo.pop_back();
        if (s.nodes[i].part != side || !comp.insert(i).second) continue;
        for (auto t : touched_chans(s.nodes[i])) {
          if (auto p = l.provider(t)) todo.push_back(*p);
          if (auto q = l.client(t)) todo.push_back(*q);
        }
      }
      move_to(s, comp, Part::program);
      changed = true;
      break;
    }
  }
  return s;
}

std::vector<std::pair<ObsAction, std::size_t>> Harness::ready(const Configuration& s) const {
  const auto& lat = rt_.lattice();
  auto low = [&](Chan ch) { return lat.leq(rt_.chans().maxsec(ch), opt_.xi); };
  Links l(s);
  std::vector<std::pair<ObsAction, std::size_t>> out;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const Node& n = s.nodes[i];
    ObsAction a;
    std::optional<std::size_t> rcv;
    if (n.is_msg()) {
      a.kind = ObsAction::Kind::message;
      a.channel = n.carrier;
      a.mkind = n.mkind;
      a.label = n.label;
      a.cont = n.cont;
      a.payload = n.payload;
      rcv = msg_positive(n.mkind) ? l.client(n.carrier) : l.provider(n.carrier);
    } else if (n.term->kind == Term::Kind::fwd) {
      a.kind = ObsAction::Kind::forward;
      a.channel = n.offer;
      a.target = *n.lookup(n.term->other);
      rcv = l.client(n.offer);
      if (!rcv && is_hidden(s, n.offer)) continue;
    } else {
      continue;
    }
    if (!low(a.channel)) continue;
    Part rp = rcv ? s.nodes[*rcv].part : Part::above;
    if (rp == n.part) continue;
    if (n.part == Part::program) {
      a.dir = ObsAction::Dir::out;
    } else if (rcv && rp == Part::program) {
      a.dir = ObsAction::Dir::in;
    } else {
      continue;
    }
    out.emplace_back(a, i);
  }
  return out;
}

std::vector<Configuration> Harness::cross(const Configuration& s, const ObsAction& a, std::size_t node) const {
  std::vector<Configuration> out;
  if (a.kind == ObsAction::Kind::forward) {
    out.push_back(normalize(rt_.apply(s, Redex{Rule::fwd, node, std::nullopt, 0})));
    return out;
  }
  Links l(s);
  const Node& m = s.nodes[node];
  Configuration c = s;
  if (a.dir == ObsAction::Dir::in) {
    c.nodes[node].part = Part::program;
    if (m.mkind == MsgKind::send_neg && m.part == Part::above) {
      std::vector<std::size_t> roots;
      if (auto p = l.provider(m.payload)) roots.push_back(*p);
      move_to(c, subtree(s, l, roots, Part::above), Part::below);
    }
    out.push_back(normalize(std::move(c)));
    return out;
  }
  if (m.mkind != MsgKind::send_pos && m.mkind != MsgKind::send_neg) {
    Part dest = Part::above;
    if (auto r = msg_positive(m.mkind) ? l.client(m.carrier) : l.provider(m.carrier)) dest = s.nodes[*r].part;
    c.nodes[node].part = dest;
    out.push_back(normalize(std::move(c)));
    return out;
  }
  // Tensor or lolli hand-over: T is the payload's tree inside the program.
  std::vector<std::size_t> roots;
  if (auto p = l.provider(m.payload)) roots.push_back(*p);
  auto tree = subtree(s, l, roots, Part::program);
  std::set<std::size_t> c2 = providers_below(s, l, tree, Part::below);
  if (auto p = l.provider(m.payload); p && s.nodes[*p].part == Part::below)
    for (auto i : subtree(s, l, {*p}, Part::below)) c2.insert(i);
  std::set<std::size_t> rest;
  for (std::size_t i = 0; i < s.nodes.size(); ++i)
    if (s.nodes[i].part == Part::program && i != node && !tree.count(i)) rest.insert(i);
  std::set<std::size_t> rest_and_msg = rest;
  rest_and_msg.insert(node);
  std::set<std::size_t> c1 = providers_below(s, l, rest_and_msg, Part::below);
  for (auto i : c2) c1.erase(i);

  Configuration plain = s;
  if (m.mkind == MsgKind::send_pos) {
    move_to(plain, tree, Part::above);
    move_to(plain, c2, Part::above);
    plain.nodes[node].part = Part::above;
  } else {
    move_to(plain, tree, Part::below);
    plain.nodes[node].part = Part::below;
  }
  out.push_back(normalize(std::move(plain)));

  Configuration primed = s;
  move_to(primed, rest, Part::above);
  move_to(primed, c1, Part::above);
  primed.nodes[node].part = Part::above;
  out.push_back(normalize(std::move(primed)));
  return out;
}

std::vector<std::pair<Chan, bool>> Harness::observable_interface(const Configuration& s) const {
  const auto& lat = rt_.lattice();
  Links l(s);
  std::set<std::pair<Chan, bool>> out;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const Node& n = s.nodes[i];
    if (n.part != Part::program) continue;
    auto p = n.provides();
    auto q = l.client(p);
    if ((q ? s.nodes[*q].part != Part::program : !is_hidden(s, p)) && lat.leq(rt_.chans().maxsec(p), opt_.xi))
      out.insert({p, true});
    for (auto u : n.uses()) {
      auto r = l.provider(u);
      if ((!r || s.nodes[*r].part != Part::program) && lat.leq(rt_.chans().maxsec(u), opt_.xi))
        out.insert({u, false});
    }
  }
  return {out.begin(), out.end()};
}

Configuration program_part(const Configuration& s) {
  Configuration out;
  out.next_uid = s.next_uid;
  std::map<Chan, const Node*> prov;
  std::map<Chan, const Node*> cli;
  for (const auto& n : s.nodes) {
    prov[n.provides()] = &n;
    for (auto u : n.uses()) cli[u] = &n;
  }
  auto type_of = [](const Node& n) { return n.is_proc() ? n.offer_type : n.msg_type; };
  for (const auto& n : s.nodes) {
    if (n.part != Part::program) continue;
    out.nodes.push_back(n);
    for (auto u : n.uses()) {
      auto it = prov.find(u);
      if (it != prov.end() && it->second->part != Part::program) out.uses.push_back({u, type_of(*it->second)});
    }
    auto it = cli.find(n.provides());
    if (it != cli.end() && it->second->part != Part::program) out.provides.push_back({n.provides(), type_of(n)});
  }
  for (const auto& u : s.uses) {
    auto it = cli.find(u.chan);
    if (it != cli.end() && it->second->part == Part::program) out.uses.push_back(u);
  }
  for (const auto& p : s.provides) {
    auto it = prov.find(p.chan);
    if (it != prov.end() && it->second->part == Part::program) out.provides.push_back(p);
  }
  return out;
}

std::vector<StepInfo> Explored::path_to(std::size_t i) const {
  std::vector<StepInfo> out;
  while (i != 0) {
    out.push_back(via[i]);
    i = parent[i];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Explored explore_tree(const Runtime& rt, const Configuration& c, std::size_t depth, std::size_t max_states) {
  Explored ex;
  std::unordered_map<std::uint64_t, std::size_t> seen;
  ex.states.push_back(c);
  ex.parent.push_back(0);
  ex.via.emplace_back();
  ex.depth.push_back(0);
  seen.emplace(c.hash(), 0);
  bool truncated = false;
  for (std::size_t i = 0; i < ex.states.size(); ++i) {
    auto en = rt.enabled(ex.states[i]);
    if (en.empty()) continue;
    if (ex.depth[i] >= depth) {
      truncated = true;
      continue;
    }
    for (const auto& r : en) {
      StepInfo si;
      Configuration t = rt.apply(ex.states[i], r, &si);
      auto h = t.hash();
      if (seen.count(h)) continue;
      if (max_states && ex.states.size() >= max_states) {
        truncated = true;
        break;
      }
      seen.emplace(h, ex.states.size());
      ex.states.push_back(std::move(t));
      ex.parent.push_back(i);
      ex.via.push_back(std::move(si));
      ex.depth.push_back(ex.depth[i] + 1);
    }
  }
  ex.complete = !truncated;
  return ex;
}

std::vector<std::uint64_t> sending_nodes(const Configuration& c, const std::vector<Chan>& upsilon) {
  std::vector<std::uint64_t> out;
  for (const auto& n : c.nodes) {
    bool hit = n.is_msg() ? std::find(upsilon.begin(), upsilon.end(), n.carrier) != upsilon.end()
                          : n.term->kind == Term::Kind::fwd &&
                                std::find(upsilon.begin(), upsilon.end(), n.offer) != upsilon.end();
    if (hit) out.push_back(n.uid);
  }
  return out;
}

std::optional<Configuration> replay_step(const Runtime& rt, const Configuration& c, const StepInfo& s,
                                         StepInfo* info) {
  for (const auto& r : rt.enabled(c)) {
    if (r.rule != s.rule || !node_equal(c.nodes[r.proc], s.pre_nodes.at(0))) continue;
    if (r.msg && (s.pre_nodes.size() < 2 || !node_equal(c.nodes[*r.msg], s.pre_nodes[1]))) continue;
    return rt.apply(c, r, info);
  }
  return std::nullopt;
}

namespace {

bool sends_all(const Configuration& c, const std::vector<Chan>& upsilon) {
  auto ids = sending_nodes(c, upsilon);
  std::set<Chan> got;
  for (const auto& n : c.nodes)
    if (std::find(ids.begin(), ids.end(), n.uid) != ids.end()) got.insert(n.is_msg() ? n.carrier : n.offer);
  return got.size() == std::set<Chan>(upsilon.begin(), upsilon.end()).size();
}

struct Replayed {
  Configuration config;
  // Witness birth stamps to replayed ones.
  std::map<std::uint64_t, std::uint64_t> uid;
};

// Replays the chosen witness steps in order, matching acting nodes by birth
// stamp. A skipped forward's output stands for its input (alias).
std::optional<Replayed> replay_steps(const Runtime& rt, const Configuration& d, const std::vector<StepInfo>& steps,
                                     const std::vector<std::size_t>& order,
                                     const std::map<std::uint64_t, std::uint64_t>& alias) {
  Replayed out{d, {}};
  auto resolve = [&](std::uint64_t u) {
    for (auto a = alias.find(u); a != alias.end(); a = alias.find(u)) u = a->second;
    auto it = out.uid.find(u);
    return it == out.uid.end() ? u : it->second;
  };
  for (auto i : order) {
    const auto& s = steps[i];
    auto p = resolve(s.pre.at(0));
    std::optional<Redex> pick;
    for (const auto& r : rt.enabled(out.config)) {
      if (r.rule != s.rule || out.config.nodes[r.proc].uid != p) continue;
      if (r.msg && (s.pre.size() < 2 || out.config.nodes[*r.msg].uid != resolve(s.pre[1]))) continue;
      pick = r;
      break;
    }
    if (!pick) return std::nullopt;
    StepInfo si;
    out.config = rt.apply(out.config, *pick, &si);
    if (si.post.size() != s.post.size()) return std::nullopt;
    for (std::size_t k = 0; k < s.post.size(); ++k) out.uid[s.post[k]] = si.post[k];
  }
  return out;
}

// Steps the target nodes depend on; dropped forwards act as aliases.
std::vector<std::size_t> backward_slice(const std::vector<StepInfo>& steps, const std::vector<std::uint64_t>& target,
                                        const std::set<std::size_t>& dropped,
                                        std::map<std::uint64_t, std::uint64_t>& alias) {
  alias.clear();
  for (auto i : dropped) alias[steps[i].post.at(0)] = steps[i].pre.at(1);
  auto resolve = [&](std::uint64_t u) {
    for (auto a = alias.find(u); a != alias.end(); a = alias.find(u)) u = a->second;
    return u;
  };
  std::set<std::uint64_t> m;
  for (auto u : target) m.insert(resolve(u));
  std::set<std::uint64_t> visited = m;
  std::set<std::size_t> slice;
  while (!m.empty()) {
    std::set<std::uint64_t> next;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (dropped.count(i) || slice.count(i)) continue;
      const auto& post = steps[i].post;
      if (std::none_of(post.begin(), post.end(), [&](auto u) { return m.count(u) != 0; })) continue;
      slice.insert(i);
      for (auto u : steps[i].pre)
        if (visited.insert(resolve(u)).second) next.insert(resolve(u));
    }
    m = std::move(next);
  }
  return {slice.begin(), slice.end()};
}

}  // namespace

Configuration minimal_sending(const Runtime& rt, const Configuration& d, const std::vector<Chan>& upsilon,
                              const std::vector<StepInfo>& witness) {
  std::vector<std::size_t> all(witness.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto full = replay_steps(rt, d, witness, all, {});
  if (!full) throw RuntimeError("witness step cannot be replayed");
  for (auto ch : upsilon)
    if (!sends_all(full->config, {ch})) throw RuntimeError("witness does not send along " + rt.chans().display(ch));
  // Target nodes in witness birth stamps.
  std::map<std::uint64_t, std::uint64_t> back;
  for (const auto& [w, r] : full->uid) back[r] = w;
  std::vector<std::uint64_t> target;
  for (auto u : sending_nodes(full->config, upsilon)) target.push_back(back.count(u) ? back[u] : u);

  // Forwards only rename; drop each one the slice can do without.
  std::set<std::size_t> dropped;
  std::map<std::uint64_t, std::uint64_t> alias;
  auto slice = backward_slice(witness, target, dropped, alias);
  auto res = replay_steps(rt, d, witness, slice, alias);
  if (!res) throw RuntimeError("sliced steps cannot be replayed");
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = slice.rbegin(); it != slice.rend(); ++it) {
      const auto& st = witness[*it];
      if (st.rule != Rule::fwd || st.post.size() != 1 || st.pre.size() != 2) continue;
      auto trial = dropped;
      trial.insert(*it);
      std::map<std::uint64_t, std::uint64_t> a2;
      auto s2 = backward_slice(witness, target, trial, a2);
      auto r2 = replay_steps(rt, d, witness, s2, a2);
      if (!r2 || !sends_all(r2->config, upsilon)) continue;
      dropped = std::move(trial);
      slice = std::move(s2);
      res = std::move(r2);
      changed = true;
      break;
    }
  }
  return res->config;
}

std::optional<Configuration> minimal_sending_oracle(const Runtime& rt, const Configuration& d,
                                                    const std::vector<Chan>& upsilon, std::size_t max_states) {
  auto ex = explore_tree(rt, d, static_cast<std::size_t>(-1), max_states);
  if (!ex.complete) return std::nullopt;
  const std::size_t n = ex.states.size();
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(ex.states[i].hash(), i);
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& r : rt.enabled(ex.states[i])) succ[i].push_back(index.at(rt.apply(ex.states[i], r).hash()));
  auto sends = [&](const Configuration& c) {
    std::set<Chan> s;
    for (const auto& nd : c.nodes)
      for (auto u : sending_nodes(c, upsilon))
        if (nd.uid == u) s.insert(nd.is_msg() ? nd.carrier : nd.offer);
    return s.size() == std::set<Chan>(upsilon.begin(), upsilon.end()).size();
  };
  std::vector<std::size_t> cands;
  for (std::size_t i = 0; i < n; ++i)
    if (sends(ex.states[i])) cands.push_back(i);
  for (auto c : cands) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> todo{c};
    seen[c] = true;
    while (!todo.empty()) {
      auto i = todo.back();
      todo.pop_back();
      for (auto j : succ[i])
        if (!seen[j]) {
          seen[j] = true;
          todo.push_back(j);
        }
    }
    if (std::all_of(cands.begin(), cands.end(), [&](auto k) { return seen[k]; })) return ex.states[c];
  }
  return std::nullopt;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::equivalent:
      return "true";
    case Verdict::distinguished:
      return "false";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

Bisimulation::Ready Bisimulation::weak(const Harness& h, const Configuration& s) {
  ++explorations_;
  Ready r;
  r.ex = explore_tree(h.runtime(), s, h.options().depth, h.options().max_states);
  for (std::size_t i = 0; i < r.ex.states.size(); ++i)
    for (const auto& [a, node] : h.ready(r.ex.states[i])) {
      if (std::find(r.labels.begin(), r.labels.end(), a) != r.labels.end()) continue;
      r.labels.push_back(a);
      r.state.push_back(i);
      r.node.push_back(node);
    }
  return r;
}

std::vector<Configuration> Bisimulation::post(const Harness& h, const Configuration& s, const Ready& r,
                                              std::size_t k) {
  const auto& a = r.labels[k];
  Configuration from = r.ex.states[r.state[k]];
  std::size_t node = r.node[k];
  try {
    Configuration mini = minimal_sending(h.runtime(), s, {a.channel}, r.ex.path_to(r.state[k]));
    for (const auto& [b, i] : h.ready(mini))
      if (b == a) {
        from = std::move(mini);
        node = i;
        break;
      }
  } catch (const RuntimeError&) {
  }
  return h.cross(from, a, node);
}

BisimResult Bisimulation::check(const Configuration& s1, const Configuration& s2, std::size_t m) {
  BisimResult res;
  res.bound = m;
  if (m == 0) {
    if (h1_.observable_interface(s1) != h2_.observable_interface(s2)) {
      res.verdict = Verdict::distinguished;
      res.counterexample = "observable interfaces differ";
    }
    return res;
  }
  auto key = std::make_tuple(s1.hash(), s2.hash(), m);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const auto& chans = h1_.runtime().chans();
  Ready r1 = weak(h1_, s1);
  Ready r2 = weak(h2_, s2);
  bool undecided = false;
  int divergent = 0;
  std::string undecided_why;
  auto compare = [&](const Ready& a, const Ready& b, int side) -> bool {
    for (const auto& la : a.labels) {
      auto same = std::find(b.labels.begin(), b.labels.end(), la);
      if (same != b.labels.end()) continue;
      auto slot = std::find_if(b.labels.begin(), b.labels.end(), [&](const auto& lb) { return la.same_slot(lb); });
      if (slot != b.labels.end()) {
        res.verdict = Verdict::distinguished;
        res.counterexample = "side " + std::to_string(side) + " performs " + la.show(chans) + ", side " +
                             std::to_string(3 - side) + " performs " + slot->show(chans);
        return true;
      }
      if (b.ex.complete) {
        res.verdict = Verdict::distinguished;
        res.counterexample = "side " + std::to_string(side) + " performs " + la.show(chans) + ", side " +
                             std::to_string(3 - side) + " cannot";
        return true;
      }
      if (!undecided) {
        undecided = true;
        divergent = 3 - side;
        undecided_why = "side " + std::to_string(side) + " performs " + la.show(chans) + ", side " +
                        std::to_string(3 - side) + " has not within the depth bound";
      }
    }
    return false;
  };
  if (compare(r1, r2, 1) || compare(r2, r1, 2)) {
    memo_[key] = res;
    return res;
  }
  for (std::size_t k = 0; k < r1.labels.size(); ++k) {
    auto j = std::find(r2.labels.begin(), r2.labels.end(), r1.labels[k]);
    if (j == r2.labels.end()) continue;
    auto p1 = post(h1_, s1, r1, k);
    auto p2 = post(h2_, s2, r2, static_cast<std::size_t>(j - r2.labels.begin()));
    const std::string step = r1.labels[k].show(chans);
    for (std::size_t v = 0; v < p1.size() && v < p2.size(); ++v) {
      auto sub = check(p1[v], p2[v], m - 1);
      std::string tag = step + (v ? " (handover)" : "");
      if (sub.verdict == Verdict::distinguished) {
        res = sub;
        res.bound = m;
        res.trace.insert(res.trace.begin(), tag);
        memo_[key] = res;
        return res;
      }
      if (sub.verdict == Verdict::inconclusive && !undecided) {
        undecided = true;
        divergent = sub.divergent_side;
        undecided_why = sub.counterexample;
        res.trace = sub.trace;
        res.trace.insert(res.trace.begin(), tag);
      }
    }
  }
  if (undecided) {
    res.verdict = Verdict::inconclusive;
    res.divergent_side = divergent;
    res.counterexample = undecided_why;
  }
  memo_[key] = res;
  return res;
}

}  // namespace sill
