#include "sill/lattice.hpp"

#include <algorithm>

namespace sill {

SecurityLattice SecurityLattice::build(
    const std::vector<std::string>& levels,
    const std::vector<std::pair<std::string, std::string>>& order) {
  SecurityLattice l;
  l.names_ = levels;
  l.edges_ = order;
  const std::size_t n = levels.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (levels[i] == levels[j]) throw LatticeError("duplicate level `" + levels[i] + "`");
  l.leq_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) l.leq_[i * n + i] = 1;
  for (const auto& [a, b] : order) {
    auto la = l.find(a);
    auto lb = l.find(b);
    if (!la) throw LatticeError("undeclared level `" + a + "`");
    if (!lb) throw LatticeError("undeclared level `" + b + "`");
    l.leq_[l.at(*la, *lb)] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (l.leq_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (l.leq_[k * n + j]) l.leq_[i * n + j] = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && l.leq_[i * n + j] && l.leq_[j * n + i])
        throw LatticeError("order is not antisymmetric: `" + levels[i] + "` and `" + levels[j] +
                           "` are equivalent");
  l.join_.assign(n * n, SecLevel{});
  l.meet_.assign(n * n, SecLevel{});
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      std::optional<std::uint32_t> lub, glb;
      for (std::uint32_t k = 0; k < n; ++k) {
        if (l.leq_[i * n + k] && l.leq_[j * n + k]) {
          bool least = true;
          for (std::uint32_t m = 0; m < n && least; ++m)
            if (l.leq_[i * n + m] && l.leq_[j * n + m] && !l.leq_[k * n + m]) least = false;
          if (least) lub = k;
        }
        if (l.leq_[k * n + i] && l.leq_[k * n + j]) {
          bool greatest = true;
          for (std::uint32_t m = 0; m < n && greatest; ++m)
            if (l.leq_[m * n + i] && l.leq_[m * n + j] && !l.leq_[m * n + k]) greatest = false;
          if (greatest) glb = k;
        }
      }
      if (!lub)
        throw LatticeError("levels `" + levels[i] + "` and `" + levels[j] + "` have no least upper bound");
      if (!glb)
        throw LatticeError("levels `" + levels[i] + "` and `" + levels[j] + "` have no greatest lower bound");
      l.join_[i * n + j] = SecLevel{*lub};
      l.meet_[i * n + j] = SecLevel{*glb};
    }
  }
  return l;
}

std::optional<SecLevel> SecurityLattice::find(std::string_view name) const {
  for (std::uint32_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return SecLevel{i};
  return std::nullopt;
}

SecLevel SecurityLattice::level(std::string_view name) const {
  auto l = find(name);
  if (!l) throw LatticeError("undeclared level `" + std::string(name) + "`");
  return *l;
}

void SecurityLattice::check(SecLevel l) const {
  if (l.index >= names_.size()) throw LatticeError("level index out of range");
}

const std::string& SecurityLattice::name(SecLevel l) const {
  check(l);
  return names_[l.index];
}

std::vector<SecLevel> SecurityLattice::levels() const {
  std::vector<SecLevel> out;
  for (std::uint32_t i = 0; i < names_.size(); ++i) out.push_back(SecLevel{i});
  return out;
}

bool SecurityLattice::leq(SecLevel a, SecLevel b) const {
  check(a);
  check(b);
  return leq_[at(a, b)] != 0;
}

SecLevel SecurityLattice::join(SecLevel a, SecLevel b) const {
  check(a);
  check(b);
  return join_[at(a, b)];
}

SecLevel SecurityLattice::meet(SecLevel a, SecLevel b) const {
  check(a);
  check(b);
  return meet_[at(a, b)];
}

SecLevel SecurityLattice::top() const {
  if (empty()) throw LatticeError("empty lattice has no top");
  SecLevel t{0};
  for (auto l : levels()) t = join(t, l);
  return t;
}

SecLevel SecurityLattice::bottom() const {
  if (empty()) throw LatticeError("empty lattice has no bottom");
  SecLevel b{0};
  for (auto l : levels()) b = meet(b, l);
  return b;
}

SecTerm SecTerm::lit(SecLevel l) {
  SecTerm t;
  t.kind_ = Kind::literal;
  t.level_ = l;
  return t;
}

SecTerm SecTerm::var(std::string name) {
  SecTerm t;
  t.kind_ = Kind::variable;
  t.name_ = std::move(name);
  return t;
}

SecTerm SecTerm::nary(Kind k, std::vector<SecTerm> ops) {
  SecTerm t;
  t.kind_ = k;
  t.ops_ = std::move(ops);
  return t;
}

SecTerm SecTerm::join(SecTerm a, SecTerm b) { return nary(Kind::join, {std::move(a), std::move(b)}); }
SecTerm SecTerm::meet(SecTerm a, SecTerm b) { return nary(Kind::meet, {std::move(a), std::move(b)}); }

std::strong_ordering SecTerm::operator<=>(const SecTerm& o) const {
  if (auto c = kind_ <=> o.kind_; c != 0) return c;
  switch (kind_) {
    case Kind::literal:
      return level_ <=> o.level_;
    case Kind::variable:
      return name_ <=> o.name_;
    default:
      return std::lexicographical_compare_three_way(ops_.begin(), ops_.end(), o.ops_.begin(),
                                                    o.ops_.end());
  }
}

SecTerm normalize(const SecTerm& t, const SecurityLattice& l) {
  using K = SecTerm::Kind;
  if (t.kind() == K::literal || t.kind() == K::variable) return t;
  const bool is_join = t.kind() == K::join;
  std::vector<SecTerm> flat;
  std::optional<SecLevel> folded;
  auto push = [&](const SecTerm& s) {
    if (s.kind() == K::literal) {
      folded = folded ? (is_join ? l.join(*folded, s.level()) : l.meet(*folded, s.level())) : s.level();
    } else {
      flat.push_back(s);
    }
  };
  for (const auto& op : t.operands()) {
    SecTerm n = normalize(op, l);
    if (n.kind() == t.kind()) {
      for (const auto& inner : n.operands()) push(inner);
    } else {
      push(n);
    }
  }
  if (folded && !l.empty()) {
    SecLevel absorbing = is_join ? l.top() : l.bottom();
    SecLevel neutral = is_join ? l.bottom() : l.top();
    if (*folded == absorbing) return SecTerm::lit(*folded);
    if (*folded != neutral || flat.empty()) flat.push_back(SecTerm::lit(*folded));
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.size() == 1) return flat.front();
  return SecTerm::nary(t.kind(), std::move(flat));
}

std::string to_string(const SecTerm& t, const SecurityLattice& l) {
  switch (t.kind()) {
    case SecTerm::Kind::literal:
      return l.name(t.level());
    case SecTerm::Kind::variable:
      return t.name();
    default: {
      const char* sep = t.kind() == SecTerm::Kind::join ? " ⊔ " : " ⊓ ";
      std::string out;
      for (std::size_t i = 0; i < t.operands().size(); ++i) {
        const auto& op = t.operands()[i];
        bool paren = op.kind() == SecTerm::Kind::join || op.kind() == SecTerm::Kind::meet;
        if (i) out += sep;
        out += paren ? "(" + to_string(op, l) + ")" : to_string(op, l);
      }
      return out;
    }
  }
}

void collect_vars(const SecTerm& t, std::set<std::string>& out) {
  if (t.is_variable()) out.insert(t.name());
  for (const auto& op : t.operands()) collect_vars(op, out);
}

bool is_ground(const SecTerm& t) {
  if (t.is_variable()) return false;
  for (const auto& op : t.operands())
    if (!is_ground(op)) return false;
  return true;
}

std::optional<SecLevel> evaluate(const SecTerm& t, const SecurityLattice& l) {
  switch (t.kind()) {
    case SecTerm::Kind::literal:
      return t.level();
    case SecTerm::Kind::variable:
      return std::nullopt;
    default: {
      std::optional<SecLevel> acc;
      for (const auto& op : t.operands()) {
        auto v = evaluate(op, l);
        if (!v) return std::nullopt;
        acc = !acc ? *v : (t.kind() == SecTerm::Kind::join ? l.join(*acc, *v) : l.meet(*acc, *v));
      }
      return acc;
    }
  }
}

std::string to_string(const Constraint& c, const SecurityLattice& l) {
  return to_string(c.lhs, l) + " ⊑ " + to_string(c.rhs, l);
}

bool ExtendedLattice::has_var(std::string_view v) const {
  return std::find(vars.begin(), vars.end(), v) != vars.end();
}

ExtendedLattice concrete_only(std::shared_ptr<const SecurityLattice> base) {
  ExtendedLattice psi;
  psi.base = std::move(base);
  return psi;
}

Entailment::Entailment(const ExtendedLattice& psi, std::span<const SecTerm> extra) : psi_(&psi) {
  const auto& l = psi.lattice();
  for (auto lv : l.levels()) add(SecTerm::lit(lv));
  for (const auto& c : psi.constraints) {
    add(normalize(c.lhs, l));
    add(normalize(c.rhs, l));
  }
  for (const auto& t : extra) add(normalize(t, l));
  saturate();
}

void Entailment::add(const SecTerm& t) {
  if (index_.count(t)) return;
  for (const auto& op : t.operands()) add(op);
  index_.emplace(t, universe_.size());
  universe_.push_back(t);
}

std::size_t Entailment::index_of(const SecTerm& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) throw LatticeError("term outside entailment universe");
  return it->second;
}

void Entailment::saturate() {
  const auto& l = psi_->lattice();
  const std::size_t n = universe_.size();
  rel_.assign(n, std::vector<bool>(n, false));
  std::vector<std::size_t> lits;
  for (std::size_t i = 0; i < n; ++i) {
    rel_[i][i] = true;
    if (universe_[i].is_literal()) lits.push_back(i);
  }
  for (auto a : lits)
    for (auto b : lits)
      if (l.leq(universe_[a].level(), universe_[b].level())) rel_[a][b] = true;
  for (const auto& c : psi_->constraints)
    rel_[index_of(normalize(c.lhs, l))][index_of(normalize(c.rhs, l))] = true;
  if (!l.empty()) {
    auto bot = index_of(SecTerm::lit(l.bottom()));
    auto top = index_of(SecTerm::lit(l.top()));
    for (std::size_t i = 0; i < n; ++i) rel_[bot][i] = rel_[i][top] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = universe_[i];
    for (const auto& op : t.operands()) {
      if (t.kind() == SecTerm::Kind::join) rel_[index_of(op)][i] = true;
      if (t.kind() == SecTerm::Kind::meet) rel_[i][index_of(op)] = true;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (rel_[i][k])
          for (std::size_t j = 0; j < n; ++j)
            if (rel_[k][j] && !rel_[i][j]) {
              rel_[i][j] = true;
              changed = true;
            }
    for (std::size_t i = 0; i < n; ++i) {
      const auto& t = universe_[i];
      if (t.kind() != SecTerm::Kind::join && t.kind() != SecTerm::Kind::meet) continue;
      std::vector<std::size_t> ops;
      for (const auto& op : t.operands()) ops.push_back(index_of(op));
      for (std::size_t x = 0; x < n; ++x) {
        bool all = true;
        for (auto o : ops) all = all && (t.kind() == SecTerm::Kind::join ? rel_[o][x] : rel_[x][o]);
        if (!all) continue;
        auto cell = t.kind() == SecTerm::Kind::join ? rel_[i][x] : rel_[x][i];
        if (!cell) {
          if (t.kind() == SecTerm::Kind::join) rel_[i][x] = true; else rel_[x][i] = true;
          changed = true;
        }
      }
    }
    if (l.empty()) continue;
    for (std::size_t x = 0; x < n; ++x) {
      std::optional<SecLevel> above, below;
      for (auto c : lits) {
        SecLevel lv = universe_[c].level();
        if (rel_[x][c]) above = above ? l.meet(*above, lv) : lv;
        if (rel_[c][x]) below = below ? l.join(*below, lv) : lv;
      }
      if (above) {
        auto c = index_of(SecTerm::lit(*above));
        if (!rel_[x][c]) rel_[x][c] = changed = true;
      }
      if (below) {
        auto c = index_of(SecTerm::lit(*below));
        if (!rel_[c][x]) rel_[c][x] = changed = true;
      }
    }
  }
}

bool Entailment::leq(const SecTerm& a, const SecTerm& b) const {
  const auto& l = psi_->lattice();
  return rel_[index_of(normalize(a, l))][index_of(normalize(b, l))];
}

namespace {

void check_declared(const ExtendedLattice& psi, const SecTerm& t) {
  std::set<std::string> vs;
  collect_vars(t, vs);
  for (const auto& v : vs)
    if (!psi.has_var(v)) throw LatticeError("undeclared secrecy variable `" + v + "`");
}

}  // namespace

bool entails(const ExtendedLattice& psi, const Constraint& c) {
  check_declared(psi, c.lhs);
  check_declared(psi, c.rhs);
  const auto& l = psi.lattice();
  SecTerm a = normalize(c.lhs, l);
  SecTerm b = normalize(c.rhs, l);
  if (a == b) return true;
  if (a.is_literal() && b.is_literal() && psi.constraints.empty()) return l.leq(a.level(), b.level());
  SecTerm terms[] = {a, b};
  Entailment e(psi, terms);
  return e.leq(a, b);
}

bool entails_all(const ExtendedLattice& psi, std::span<const Constraint> cs) {
  for (const auto& c : cs)
    if (!entails(psi, c)) return false;
  return true;
}

bool entails_eq(const ExtendedLattice& psi, const SecTerm& a, const SecTerm& b) {
  return entails(psi, {a, b}) && entails(psi, {b, a});
}

bool concrete_agrees(const ExtendedLattice& psi) {
  const auto& l = psi.lattice();
  Entailment e(psi, {});
  for (auto a : l.levels())
    for (auto b : l.levels())
      if (e.leq(SecTerm::lit(a), SecTerm::lit(b)) != l.leq(a, b)) return false;
  return true;
}

std::optional<SecLevel> concretize(const ExtendedLattice& psi, const SecTerm& t) {
  const auto& l = psi.lattice();
  if (auto v = evaluate(t, l)) return v;
  SecTerm n = normalize(t, l);
  SecTerm terms[] = {n};
  Entailment e(psi, terms);
  for (auto lv : l.levels()) {
    SecTerm c = SecTerm::lit(lv);
    if (e.leq(n, c) && e.leq(c, n)) return lv;
  }
  return std::nullopt;
}

Substitution Substitution::identity(const std::vector<std::string>& vars) {
  Substitution g;
  for (const auto& v : vars) g.map.emplace(v, SecTerm::var(v));
  return g;
}

SecTerm apply_subst(const Substitution& g, const SecTerm& t, const SecurityLattice& l) {
  switch (t.kind()) {
    case SecTerm::Kind::literal:
      return t;
    case SecTerm::Kind::variable: {
      auto it = g.map.find(t.name());
      if (it == g.map.end()) throw SubstitutionError("no binding for secrecy variable `" + t.name() + "`");
      return normalize(it->second, l);
    }
    default: {
      std::vector<SecTerm> ops;
      for (const auto& op : t.operands()) ops.push_back(apply_subst(g, op, l));
      return normalize(SecTerm::nary(t.kind(), std::move(ops)), l);
    }
  }
}

Constraint apply_subst(const Substitution& g, const Constraint& c, const SecurityLattice& l) {
  return {apply_subst(g, c.lhs, l), apply_subst(g, c.rhs, l)};
}

ExtendedLattice apply_subst(const Substitution& g, const ExtendedLattice& psi) {
  ExtendedLattice out;
  out.base = psi.base;
  std::set<std::string> vs;
  for (const auto& c : psi.constraints) {
    Constraint m = apply_subst(g, c, psi.lattice());
    collect_vars(m.lhs, vs);
    collect_vars(m.rhs, vs);
    out.constraints.push_back(std::move(m));
  }
  for (const auto& v : psi.vars) {
    auto it = g.map.find(v);
    if (it == g.map.end()) throw SubstitutionError("no binding for secrecy variable `" + v + "`");
    collect_vars(it->second, vs);
  }
  out.vars.assign(vs.begin(), vs.end());
  return out;
}

}  // namespace sill
