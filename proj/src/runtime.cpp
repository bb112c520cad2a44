#include "sill/runtime.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "sill/checker.hpp"

namespace sill {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t chan_hash(Chan c) { return (static_cast<std::uint64_t>(c.base) << 32) | c.gen; }

Chan next_gen(Chan c) { return {c.base, c.gen + 1}; }

}  // namespace

std::uint32_t ChannelTable::intern(const std::string& key, const std::string& display, SecLevel maxsec) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    if (secs_[it->second] != maxsec)
      throw RuntimeError("channel `" + display + "` re-declared with a different maximal secrecy");
    return it->second;
  }
  auto id = static_cast<std::uint32_t>(names_.size());
  index_.emplace(key, id);
  names_.push_back(display);
  secs_.push_back(maxsec);
  return id;
}

std::optional<std::uint32_t> ChannelTable::find(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string ChannelTable::display(Chan c) const { return names_.at(c.base) + "_" + std::to_string(c.gen); }

const char* msg_kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::close:
      return "close";
    case MsgKind::label_pos:
      return "label+";
    case MsgKind::label_neg:
      return "label-";
    case MsgKind::send_pos:
      return "send+";
    case MsgKind::send_neg:
      return "send-";
  }
  return "?";
}

bool msg_positive(MsgKind k) { return k == MsgKind::close || k == MsgKind::label_pos || k == MsgKind::send_pos; }

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::fwd:
      return "fwd";
    case Rule::spawn:
      return "spawn";
    case Rule::one_snd:
      return "1snd";
    case Rule::one_rcv:
      return "1rcv";
    case Rule::plus_snd:
      return "+snd";
    case Rule::plus_rcv:
      return "+rcv";
    case Rule::with_snd:
      return "&snd";
    case Rule::with_rcv:
      return "&rcv";
    case Rule::tensor_snd:
      return "*snd";
    case Rule::tensor_rcv:
      return "*rcv";
    case Rule::lolli_snd:
      return "-osnd";
    case Rule::lolli_rcv:
      return "-orcv";
  }
  return "?";
}

Chan Node::provides() const {
  if (is_proc()) return offer;
  return msg_positive(mkind) ? carrier : cont;
}

std::vector<Chan> Node::uses() const {
  std::vector<Chan> out;
  if (is_proc()) {
    for (const auto& [v, c] : env)
      if (v != offer_var) out.push_back(c);
    return out;
  }
  switch (mkind) {
    case MsgKind::close:
      break;
    case MsgKind::label_pos:
      out.push_back(cont);
      break;
    case MsgKind::label_neg:
      out.push_back(carrier);
      break;
    case MsgKind::send_pos:
      out.push_back(payload);
      out.push_back(cont);
      break;
    case MsgKind::send_neg:
      out.push_back(payload);
      out.push_back(carrier);
      break;
  }
  return out;
}

std::optional<Chan> Node::lookup(const std::string& var) const {
  for (const auto& [v, c] : env)
    if (v == var) return c;
  return std::nullopt;
}

std::uint64_t Node::content_hash() const {
  std::uint64_t h = mix(static_cast<std::uint64_t>(kind) + 3, static_cast<std::uint64_t>(part));
  if (is_proc()) {
    h = mix(h, chan_hash(offer));
    h = mix(h, std::hash<std::string>{}(offer_var));
    h = mix(h, run.index);
    h = mix(h, term->hash);
    for (const auto& [v, c] : env) h = mix(mix(h, std::hash<std::string>{}(v)), chan_hash(c));
    for (const auto& [v, l] : gamma) h = mix(mix(h, std::hash<std::string>{}(v)), l.index);
  } else {
    h = mix(h, static_cast<std::uint64_t>(mkind));
    h = mix(h, chan_hash(carrier));
    h = mix(h, chan_hash(cont));
    h = mix(h, chan_hash(payload));
    h = mix(h, std::hash<std::string>{}(label));
  }
  return h;
}

bool node_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.part != b.part) return false;
  if (a.is_proc())
    return a.offer == b.offer && a.offer_var == b.offer_var && a.run == b.run && a.env == b.env &&
           a.gamma == b.gamma && (a.term == b.term || term_equal(*a.term, *b.term));
  return a.mkind == b.mkind && a.carrier == b.carrier && a.cont == b.cont && a.payload == b.payload &&
         a.label == b.label;
}

std::uint64_t Configuration::hash() const {
  std::vector<std::uint64_t> hs;
  hs.reserve(nodes.size());
  for (const auto& n : nodes) hs.push_back(n.content_hash());
  std::sort(hs.begin(), hs.end());
  std::uint64_t h = 0x51ed270b;
  for (auto x : hs) h = mix(h, x);
  std::vector<std::uint64_t> is;
  for (const auto& u : uses) is.push_back(chan_hash(u.chan) * 2);
  for (const auto& p : provides) is.push_back(chan_hash(p.chan) * 2 + 1);
  std::sort(is.begin(), is.end());
  for (auto x : is) h = mix(h, x);
  return h;
}

bool config_equal(const Configuration& a, const Configuration& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  std::vector<bool> used(b.nodes.size(), false);
  for (const auto& n : a.nodes) {
    bool found = false;
    for (std::size_t j = 0; j < b.nodes.size() && !found; ++j)
      if (!used[j] && node_equal(n, b.nodes[j])) used[j] = found = true;
    if (!found) return false;
  }
  auto chans = [](const std::vector<InterfaceChan>& v) {
    std::vector<Chan> out;
    for (const auto& i : v) out.push_back(i.chan);
    std::sort(out.begin(), out.end());
    return out;
  };
  return chans(a.uses) == chans(b.uses) && chans(a.provides) == chans(b.provides);
}

Runtime::Runtime(std::shared_ptr<const Program> prog, std::shared_ptr<ChannelTable> chans)
    : prog_(std::move(prog)), chans_(chans ? std::move(chans) : std::make_shared<ChannelTable>()) {}

namespace {

SecLevel eval_under(const std::vector<std::pair<std::string, SecLevel>>& gamma, const SecTerm& t,
                    const SecurityLattice& l) {
  Substitution g;
  for (const auto& [v, lv] : gamma) g.map.emplace(v, SecTerm::lit(lv));
  auto v = evaluate(apply_subst(g, t, l), l);
  if (!v) throw RuntimeError("secrecy term does not evaluate to a level");
  return *v;
}

std::vector<std::pair<std::string, SecLevel>> concrete_gamma(const ProcDef& callee, const std::vector<SecLevel>& args,
                                                           SecLevel max, SecLevel run, const SecurityLattice& l) {
  std::vector<SecTerm> arg_terms;
  for (auto a : args) arg_terms.push_back(SecTerm::lit(a));
  auto eq = [&](const SecTerm& a, const SecTerm& b) {
    auto x = evaluate(a, l), y = evaluate(b, l);
    return x && y && *x == *y;
  };
  auto m = match_callee(callee, arg_terms, SecTerm::lit(max), SecTerm::lit(run), eq);
  if (auto* f = std::get_if<MatchFailure>(&m)) throw RuntimeError(f->message);
  std::vector<std::pair<std::string, SecLevel>> out;
  for (const auto& [v, t] : std::get<Substitution>(m).map) out.emplace_back(v, *evaluate(t, l));
  return out;
}

// Restricts a process node's environment and substitution to what its term mentions.
void trim(Node& n) {
  const auto& fc = n.term->free_chans;
  std::erase_if(n.env, [&](const auto& e) { return !std::binary_search(fc.begin(), fc.end(), e.first); });
  std::sort(n.env.begin(), n.env.end());
  const auto& fs = n.term->free_secvars;
  std::erase_if(n.gamma, [&](const auto& e) { return !std::binary_search(fs.begin(), fs.end(), e.first); });
  std::sort(n.gamma.begin(), n.gamma.end());
}

void set_env(Node& n, const std::string& var, Chan c) {
  for (auto& [v, ch] : n.env)
    if (v == var) {
      ch = c;
      return;
    }
  n.env.emplace_back(var, c);
  std::sort(n.env.begin(), n.env.end());
}

void erase_env(Node& n, const std::string& var) {
  std::erase_if(n.env, [&](const auto& e) { return e.first == var; });
}

Chan env_at(const Node& n, const std::string& var) {
  auto c = n.lookup(var);
  if (!c) throw RuntimeError("channel variable `" + var + "` is unbound at run time");
  return *c;
}

}  // namespace

Configuration Runtime::instantiate(const ConfigDecl& decl) const {
  const auto& lat = lattice();
  Configuration c;
  std::map<std::string, std::pair<Chan, TypeRef>> open;
  std::vector<std::string> open_order;
  auto make_chan = [&](const ChannelDecl& d) {
    auto lv = evaluate(d.sec, lat);
    if (!lv) throw RuntimeError("configuration secrecy must be a level");
    return Chan{chans_->intern("cfg:" + decl.name + ":" + d.name, d.name, *lv), 0};
  };
  for (const auto& line : decl.lines) {
    const ProcDef* callee = sig().find_proc(line.callee);
    if (!callee) throw RuntimeError("unknown process `" + line.callee + "`");
    Node n;
    n.part = line.part;
    n.uid = c.next_uid++;
    std::vector<SecLevel> arg_secs;
    for (std::size_t i = 0; i < line.args.size(); ++i) {
      const auto& a = line.args[i];
      Chan ch;
      if (a.dangling) {
        ch = make_chan(*a.dangling);
        c.uses.push_back({ch, a.dangling->type, true});
      } else {
        auto it = open.find(a.name);
        if (it == open.end()) throw RuntimeError("configuration channel `" + a.name + "` is not available");
        ch = it->second.first;
        open.erase(it);
        std::erase(open_order, a.name);
      }
      arg_secs.push_back(chans_->maxsec(ch));
      n.env.emplace_back(callee->ctx[i].name, ch);
    }
    Chan self = make_chan(line.chan);
    auto run = evaluate(line.run, lat);
    if (!run) throw RuntimeError("configuration running secrecy must be a level");
    n.offer = self;
    n.offer_var = callee->offered.name;
    n.offer_type = callee->offered.type;
    n.run = *run;
    n.term = callee->body;
    n.env.emplace_back(callee->offered.name, self);
    n.gamma = concrete_gamma(*callee, arg_secs, chans_->maxsec(self), *run, lat);
    trim(n);
    c.nodes.push_back(std::move(n));
    if (open.count(line.chan.name)) throw RuntimeError("configuration channel `" + line.chan.name + "` bound twice");
    open[line.chan.name] = {self, line.chan.type};
    open_order.push_back(line.chan.name);
  }
  for (const auto& name : open_order) c.provides.push_back({open[name].first, open[name].second, true});
  return c;
}

Configuration Runtime::instantiate(const std::string& name) const {
  const ConfigDecl* d = program().find_config(name);
  if (!d) throw RuntimeError("unknown configuration `" + name + "`");
  return instantiate(*d);
}

std::optional<std::size_t> Runtime::provider(const Configuration& c, Chan ch) const {
  for (std::size_t i = 0; i < c.nodes.size(); ++i)
    if (c.nodes[i].provides() == ch) return i;
  return std::nullopt;
}

std::optional<std::size_t> Runtime::client(const Configuration& c, Chan ch) const {
  for (std::size_t i = 0; i < c.nodes.size(); ++i)
    for (auto u : c.nodes[i].uses())
      if (u == ch) return i;
  return std::nullopt;
}

namespace {

struct Index {
  std::map<Chan, std::size_t> prov;
  std::map<Chan, std::size_t> cli;

  explicit Index(const Configuration& c) {
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      prov[c.nodes[i].provides()] = i;
      for (auto u : c.nodes[i].uses()) cli[u] = i;
    }
  }
  std::optional<std::size_t> provider(Chan ch) const {
    auto it = prov.find(ch);
    if (it == prov.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> client(Chan ch) const {
    auto it = cli.find(ch);
    if (it == cli.end()) return std::nullopt;
    return it->second;
  }
};

bool hidden_top(const Configuration& c, Chan ch) {
  for (const auto& p : c.provides)
    if (p.chan == ch) return !p.observable;
  return false;
}

// Receive redex of process i, if its partner message is present in the same part.
std::optional<Redex> receive_redex(const Configuration& c, const Index& ix, std::size_t i) {
  const Node& n = c.nodes[i];
  const Term& t = *n.term;
  const bool right = t.chan == n.offer_var;
  auto same = [&](std::size_t j) { return c.nodes[j].is_msg() && c.nodes[j].part == n.part; };
  auto inbound = [&](std::optional<std::size_t> q, MsgKind k) {
    return q && same(*q) && c.nodes[*q].mkind == k && c.nodes[*q].carrier == n.offer;
  };
  auto mk = [&](Rule r, std::size_t j) {
    return Redex{r, i, j, std::max(n.uid, c.nodes[j].uid)};
  };
  switch (t.kind) {
    case Term::Kind::wait: {
      auto p = ix.provider(env_at(n, t.chan));
      if (p && same(*p) && c.nodes[*p].mkind == MsgKind::close) return mk(Rule::one_rcv, *p);
      return std::nullopt;
    }
    case Term::Kind::cases:
      if (right) {
        auto q = ix.client(n.offer);
        if (inbound(q, MsgKind::label_neg)) return mk(Rule::with_rcv, *q);
      } else {
        auto p = ix.provider(env_at(n, t.chan));
        if (p && same(*p) && c.nodes[*p].mkind == MsgKind::label_pos) return mk(Rule::plus_rcv, *p);
      }
      return std::nullopt;
    case Term::Kind::recv:
      if (right) {
        auto q = ix.client(n.offer);
        if (inbound(q, MsgKind::send_neg)) return mk(Rule::lolli_rcv, *q);
      } else {
        auto p = ix.provider(env_at(n, t.chan));
        if (p && same(*p) && c.nodes[*p].mkind == MsgKind::send_pos) return mk(Rule::tensor_rcv, *p);
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

}  // namespace

std::vector<Redex> Runtime::enabled(const Configuration& c) const {
  Index ix(c);
  std::vector<Redex> out;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const Node& n = c.nodes[i];
    if (!n.is_proc()) continue;
    const Term& t = *n.term;
    const bool right = t.chan == n.offer_var;
    switch (t.kind) {
      case Term::Kind::close:
        out.push_back({Rule::one_snd, i, std::nullopt, n.uid});
        break;
      case Term::Kind::select:
        out.push_back({right ? Rule::plus_snd : Rule::with_snd, i, std::nullopt, n.uid});
        break;
      case Term::Kind::send:
        out.push_back({right ? Rule::tensor_snd : Rule::lolli_snd, i, std::nullopt, n.uid});
        break;
      case Term::Kind::spawn:
        out.push_back({Rule::spawn, i, std::nullopt, n.uid});
        break;
      case Term::Kind::fwd: {
        auto q = ix.client(n.offer);
        bool internal = q ? c.nodes[*q].part == n.part : hidden_top(c, n.offer);
        if (internal) out.push_back({Rule::fwd, i, std::nullopt, n.uid});
        break;
      }
      default:
        if (auto r = receive_redex(c, ix, i)) out.push_back(*r);
        break;
    }
  }
  return out;
}

Chan Runtime::fresh(const Node& parent, const Term& spawn, SecLevel maxsec) const {
  std::string key = std::to_string(parent.offer.base) + ":" + std::to_string(parent.offer.gen) + ":" +
                    std::to_string(spawn.hash);
  std::string var = spawn.other;
  while (!var.empty() && var.back() == '$') var.pop_back();
  if (auto b = chans_->find(key)) return {*b, 0};
  std::string display = var + "~" + std::to_string(chans_->size());
  return {chans_->intern(key, display, maxsec), 0};
}

namespace {

TypeRef chan_type(const Configuration& c, const Index& ix, Chan ch) {
  if (auto p = ix.provider(ch)) {
    const Node& n = c.nodes[*p];
    return n.is_proc() ? n.offer_type : n.msg_type;
  }
  for (const auto& u : c.uses)
    if (u.chan == ch) return u.type;
  return nullptr;
}

void rename_chan(Chan& c, const Renaming& r) {
  if (c == r.from) c = r.to;
}

}  // namespace

Configuration Runtime::apply(const Configuration& c0, const Redex& r, StepInfo* info) const {
  const auto& types = sig().types;
  const auto& lat = lattice();
  Configuration c = c0;
  Index ix(c0);
  Node& n = c.nodes.at(r.proc);
  if (!n.is_proc()) throw RuntimeError("redex does not start at a process");
  const Term& t = *n.term;
  StepInfo si;
  si.rule = r.rule;
  si.run_before = n.run;
  si.pre.push_back(n.uid);
  si.pre_nodes.push_back(c0.nodes[r.proc]);
  if (r.msg) {
    si.pre.push_back(c.nodes.at(*r.msg).uid);
    si.pre_nodes.push_back(c0.nodes[*r.msg]);
  }
  std::vector<Node> added;
  bool remove_proc = false;
  auto new_msg = [&](MsgKind k) {
    Node m;
    m.kind = Node::Kind::msg;
    m.part = n.part;
    m.mkind = k;
    return m;
  };
  auto branch_type = [&](const TypeRef& ty, const std::string& l) -> TypeRef {
    if (!ty) return nullptr;
    auto h = head(types, ty);
    auto b = h->branch(l);
    if (!b) throw RuntimeError("label `" + l + "` is not part of the channel's protocol");
    return b;
  };
  auto cont_type = [&](const TypeRef& ty) -> TypeRef { return ty ? head(types, ty)->cont() : nullptr; };

  switch (r.rule) {
    case Rule::one_snd: {
      Node m = new_msg(MsgKind::close);
      m.carrier = n.offer;
      m.msg_type = n.offer_type;
      si.channel = n.offer;
      added.push_back(std::move(m));
      remove_proc = true;
      break;
    }
    case Rule::plus_snd: {
      Node m = new_msg(MsgKind::label_pos);
      m.carrier = n.offer;
      m.cont = next_gen(n.offer);
      m.label = t.label;
      m.msg_type = n.offer_type;
      si.channel = n.offer;
      n.offer_type = branch_type(n.offer_type, t.label);
      n.offer = m.cont;
      set_env(n, n.offer_var, n.offer);
      n.term = t.cont;
      added.push_back(std::move(m));
      break;
    }
    case Rule::with_snd: {
      Chan x = env_at(n, t.chan);
      Node m = new_msg(MsgKind::label_neg);
      m.carrier = x;
      m.cont = next_gen(x);
      m.label = t.label;
      m.msg_type = branch_type(chan_type(c0, ix, x), t.label);
      si.channel = x;
      set_env(n, t.chan, m.cont);
      n.term = t.cont;
      added.push_back(std::move(m));
      break;
    }
    case Rule::tensor_snd: {
      Node m = new_msg(MsgKind::send_pos);
      m.carrier = n.offer;
      m.cont = next_gen(n.offer);
      m.payload = env_at(n, t.other);
      m.msg_type = n.offer_type;
      si.channel = n.offer;
      n.offer_type = cont_type(n.offer_type);
      n.offer = m.cont;
      set_env(n, n.offer_var, n.offer);
      erase_env(n, t.other);
      n.term = t.cont;
      added.push_back(std::move(m));
      break;
    }
    case Rule::lolli_snd: {
      Chan u = env_at(n, t.chan);
      Node m = new_msg(MsgKind::send_neg);
      m.carrier = u;
      m.cont = next_gen(u);
      m.payload = env_at(n, t.other);
      m.msg_type = cont_type(chan_type(c0, ix, u));
      si.channel = u;
      set_env(n, t.chan, m.cont);
      erase_env(n, t.other);
      n.term = t.cont;
      added.push_back(std::move(m));
      break;
    }
    case Rule::spawn: {
      const ProcDef* callee = sig().find_proc(t.callee);
      if (!callee) throw RuntimeError("unknown process `" + t.callee + "`");
      SecLevel max = eval_under(n.gamma, t.spawn_max, lat);
      SecLevel run = eval_under(n.gamma, t.spawn_run, lat);
      std::vector<SecLevel> arg_secs;
      Node child;
      child.kind = Node::Kind::proc;
      child.part = n.part;
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        Chan a = env_at(n, t.args[i]);
        arg_secs.push_back(chans_->maxsec(a));
        child.env.emplace_back(callee->ctx[i].name, a);
        erase_env(n, t.args[i]);
      }
      Chan x0 = fresh(n, t, max);
      child.offer = x0;
      child.offer_var = callee->offered.name;
      child.offer_type = callee->offered.type;
      child.run = run;
      child.term = callee->body;
      child.env.emplace_back(callee->offered.name, x0);
      child.gamma = concrete_gamma(*callee, arg_secs, max, run, lat);
      trim(child);
      si.channel = x0;
      si.run_after = run;
      set_env(n, t.other, x0);
      n.term = t.cont;
      added.push_back(std::move(child));
      break;
    }
    case Rule::fwd: {
      // Rename on the receiving side so that later traffic keeps the names it
      // would have had anyway: positive messages flow toward the client of
      // the offer, negative ones toward the provider of the other end.
      Chan other = env_at(n, t.other);
      auto k = n.offer_type ? head(types, n.offer_type)->kind() : SessionType::Kind::one;
      bool positive = k == SessionType::Kind::one || k == SessionType::Kind::plus || k == SessionType::Kind::tensor;
      Renaming rn = positive ? Renaming{n.offer, other} : Renaming{other, n.offer};
      si.channel = n.offer;
      si.renaming = rn;
      remove_proc = true;
      for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        if (i == r.proc) continue;
        Node& o = c.nodes[i];
        Node before = o;
        rename_chan(o.offer, rn);
        for (auto& [v, ch] : o.env) rename_chan(ch, rn);
        rename_chan(o.carrier, rn);
        rename_chan(o.cont, rn);
        rename_chan(o.payload, rn);
        if (!node_equal(before, o)) {
          si.pre.push_back(o.uid);
          si.pre_nodes.push_back(before);
          o.uid = c.next_uid++;
          si.post.push_back(o.uid);
        }
      }
      for (auto& u : c.uses) rename_chan(u.chan, rn);
      for (auto& p : c.provides) rename_chan(p.chan, rn);
      break;
    }
    case Rule::one_rcv: {
      const Node& m = c0.nodes[*r.msg];
      si.channel = m.carrier;
      erase_env(n, t.chan);
      n.run = lat.join(n.run, chans_->maxsec(m.carrier));
      n.term = t.cont;
      break;
    }
    case Rule::plus_rcv: {
      const Node& m = c0.nodes[*r.msg];
      auto b = t.branch(m.label);
      if (!b) throw RuntimeError("no branch for label `" + m.label + "`");
      si.channel = m.carrier;
      set_env(n, t.chan, m.cont);
      n.run = lat.join(n.run, chans_->maxsec(m.carrier));
      n.term = b;
      break;
    }
    case Rule::with_rcv: {
      const Node& m = c0.nodes[*r.msg];
      auto b = t.branch(m.label);
      if (!b) throw RuntimeError("no branch for label `" + m.label + "`");
      si.channel = m.carrier;
      n.offer_type = branch_type(n.offer_type, m.label);
      n.offer = m.cont;
      set_env(n, n.offer_var, n.offer);
      n.run = chans_->maxsec(m.carrier);
      n.term = b;
      break;
    }
    case Rule::tensor_rcv: {
      const Node& m = c0.nodes[*r.msg];
      si.channel = m.carrier;
      set_env(n, t.chan, m.cont);
      set_env(n, t.other, m.payload);
      n.run = lat.join(n.run, chans_->maxsec(m.carrier));
      n.term = t.cont;
      break;
    }
    case Rule::lolli_rcv: {
      const Node& m = c0.nodes[*r.msg];
      si.channel = m.carrier;
      n.offer_type = cont_type(n.offer_type);
      n.offer = m.cont;
      set_env(n, n.offer_var, n.offer);
      set_env(n, t.other, m.payload);
      n.run = chans_->maxsec(m.carrier);
      n.term = t.cont;
      break;
    }
  }
  if (r.rule != Rule::spawn) si.run_after = n.run;
  std::size_t proc_index = r.proc;
  if (!remove_proc) {
    trim(n);
    n.uid = c.next_uid++;
    si.post.push_back(n.uid);
  }
  for (auto& a : added) {
    a.uid = c.next_uid++;
    si.post.push_back(a.uid);
  }
  std::vector<std::size_t> drop;
  if (remove_proc) drop.push_back(proc_index);
  if (r.msg) drop.push_back(*r.msg);
  std::sort(drop.rbegin(), drop.rend());
  for (auto d : drop) c.nodes.erase(c.nodes.begin() + static_cast<std::ptrdiff_t>(d));
  for (auto& a : added) c.nodes.push_back(std::move(a));
  if (info) *info = std::move(si);
  return c;
}

FocusSets Runtime::ready_sets(const Configuration& c) const {
  Index ix(c);
  FocusSets fs;
  auto receiver = [&](const Node& n) -> std::optional<std::size_t> {
    if (n.is_proc()) return ix.client(n.offer);
    return msg_positive(n.mkind) ? ix.client(n.carrier) : ix.provider(n.carrier);
  };
  for (const auto& n : c.nodes) {
    bool boundary_act = n.is_msg() || n.term->kind == Term::Kind::fwd;
    if (!boundary_act) continue;
    if (n.is_proc() && n.term->chan != n.offer_var) continue;
    auto rcv = receiver(n);
    Chan ch = n.is_proc() ? n.offer : n.carrier;
    if (n.part == Part::program) {
      if (!rcv || c.nodes[*rcv].part != Part::program) {
        if (n.is_proc() && !rcv && hidden_top(c, n.offer)) continue;
        fs.outgoing.push_back(ch);
      }
    } else if (rcv && c.nodes[*rcv].part == Part::program) {
      fs.incoming.push_back(ch);
    }
  }
  std::sort(fs.outgoing.begin(), fs.outgoing.end());
  std::sort(fs.incoming.begin(), fs.incoming.end());
  return fs;
}

bool Runtime::is_poised(const Configuration& c) const {
  Index ix(c);
  const std::size_t n = c.nodes.size();
  // Root of each node's tree: follow clients upward.
  std::vector<std::size_t> root(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i;
    for (std::size_t guard = 0; guard <= n; ++guard) {
      auto q = ix.client(c.nodes[cur].provides());
      if (!q) break;
      cur = *q;
    }
    root[i] = cur;
  }
  std::set<std::size_t> roots(root.begin(), root.end());
  for (auto rt : roots) {
    bool ok = false;
    for (std::size_t i = 0; i < n && !ok; ++i) {
      if (root[i] != rt) continue;
      const Node& x = c.nodes[i];
      if (x.is_msg()) {
        if (!msg_positive(x.mkind) && !ix.provider(x.carrier)) ok = true;
        if (msg_positive(x.mkind) && i == rt) ok = true;
        continue;
      }
      const Term& t = *x.term;
      const bool right = t.chan == x.offer_var;
      const bool receiving =
          t.kind == Term::Kind::wait || t.kind == Term::Kind::cases || t.kind == Term::Kind::recv;
      if (receiving && !right && !ix.provider(env_at(x, t.chan))) ok = true;
      if (receiving && right && i == rt) ok = true;
      if (t.kind == Term::Kind::fwd && i == rt && !ix.client(x.offer)) ok = true;
    }
    if (!ok) return false;
  }
  return true;
}

std::string Runtime::show(const Node& n) const {
  std::ostringstream os;
  const auto& lat = lattice();
  auto ch = [&](Chan c) { return chans_->display(c) + "[" + lat.name(chans_->maxsec(c)) + "]"; };
  const char* part = n.part == Part::below ? "C " : n.part == Part::above ? "F " : "";
  if (n.is_proc()) {
    const Term& t = *n.term;
    os << part << "proc(" << ch(n.offer) << ", ";
    switch (t.kind) {
      case Term::Kind::close:
        os << "close " << t.chan;
        break;
      case Term::Kind::wait:
        os << "wait " << t.chan << "; ..";
        break;
      case Term::Kind::select:
        os << t.chan << "." << t.label << "; ..";
        break;
      case Term::Kind::cases:
        os << "case " << t.chan << " (..)";
        break;
      case Term::Kind::send:
        os << "send " << t.other << " " << t.chan << "; ..";
        break;
      case Term::Kind::recv:
        os << t.other << " <- recv " << t.chan << "; ..";
        break;
      case Term::Kind::fwd:
        os << "fwd " << t.chan << " " << t.other;
        break;
      case Term::Kind::spawn:
        os << t.other << " <- " << t.callee << "; ..";
        break;
    }
    os << " @" << lat.name(n.run) << ")";
    if (!n.env.empty()) {
      os << " {";
      bool first = true;
      for (const auto& [v, c] : n.env) {
        os << (first ? "" : ", ") << v << "=" << chans_->display(c);
        first = false;
      }
      os << "}";
    }
    return os.str();
  }
  os << part << "msg(";
  switch (n.mkind) {
    case MsgKind::close:
      os << "close " << ch(n.carrier);
      break;
    case MsgKind::label_pos:
      os << ch(n.carrier) << "." << n.label << "; " << chans_->display(n.carrier) << " <- "
         << chans_->display(n.cont);
      break;
    case MsgKind::label_neg:
      os << ch(n.carrier) << "." << n.label << "; " << chans_->display(n.cont) << " <- "
         << chans_->display(n.carrier);
      break;
    case MsgKind::send_pos:
      os << "send " << chans_->display(n.payload) << " " << ch(n.carrier) << "; " << chans_->display(n.carrier)
         << " <- " << chans_->display(n.cont);
      break;
    case MsgKind::send_neg:
      os << "send " << chans_->display(n.payload) << " " << ch(n.carrier) << "; " << chans_->display(n.cont)
         << " <- " << chans_->display(n.carrier);
      break;
  }
  os << ")";
  return os.str();
}

std::string Runtime::show(const Configuration& c) const {
  std::string out;
  for (const auto& n : c.nodes) out += show(n) + "\n";
  return out;
}

RunResult run(const Runtime& rt, const Configuration& c, const RunOptions& opt) {
  RunResult res;
  if (opt.schedule == Schedule::exhaustive) {
    auto ex = explore(rt, c, opt.steps);
    res.states = ex.states;
    res.depth_reached = ex.layers.empty() ? 0 : ex.layers.size() - 1;
    res.budget_exhausted = !ex.complete;
    res.final = c;
    res.poised = rt.is_poised(c);
    return res;
  }
  std::mt19937_64 rng(opt.seed);
  Configuration cur = c;
  for (std::size_t step = 0; step < opt.steps; ++step) {
    auto en = rt.enabled(cur);
    if (en.empty()) break;
    std::size_t pick = 0;
    if (opt.schedule == Schedule::fifo) {
      for (std::size_t i = 1; i < en.size(); ++i)
        if (en[i].age < en[pick].age) pick = i;
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, en.size() - 1)(rng);
    }
    TraceEntry e;
    e.step = step;
    cur = rt.apply(cur, en[pick], &e.info);
    e.hash = cur.hash();
    if (opt.on_step) opt.on_step(cur, e);
    res.trace.push_back(std::move(e));
  }
  res.budget_exhausted = !rt.enabled(cur).empty();
  res.poised = rt.is_poised(cur);
  res.final = std::move(cur);
  return res;
}

Exploration explore(const Runtime& rt, const Configuration& c, std::size_t depth, std::size_t max_states) {
  Exploration ex;
  std::unordered_set<std::uint64_t> seen;
  seen.insert(c.hash());
  ex.layers.push_back({c});
  ex.states = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<Configuration> next;
    for (const auto& s : ex.layers.back())
      for (const auto& r : rt.enabled(s)) {
        Configuration t = rt.apply(s, r);
        if (seen.insert(t.hash()).second) next.push_back(std::move(t));
      }
    if (next.empty()) {
      ex.complete = true;
      return ex;
    }
    ex.states += next.size();
    ex.layers.push_back(std::move(next));
    if (max_states && ex.states > max_states) return ex;
  }
  // Complete only if the last layer has no new successors.
  bool more = false;
  for (const auto& s : ex.layers.back()) {
    for (const auto& r : rt.enabled(s))
      if (!seen.count(rt.apply(s, r).hash())) {
        more = true;
        break;
      }
    if (more) break;
  }
  ex.complete = !more;
  return ex;
}

}  // namespace sill
