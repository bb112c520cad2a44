#include "sill/ast.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace sill {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_str(const std::string& s) { return std::hash<std::string>{}(s); }

std::uint64_t hash_sec(const SecTerm& t) {
  std::uint64_t h = static_cast<std::uint64_t>(t.kind()) + 17;
  if (t.is_literal()) h = mix(h, t.level().index);
  if (t.is_variable()) h = mix(h, hash_str(t.name()));
  for (const auto& op : t.operands()) h = mix(h, hash_sec(op));
  return h;
}

}  // namespace

TermRef Term::finalize(Term t) {
  std::set<std::string> chans, secs;
  std::uint64_t h = static_cast<std::uint64_t>(t.kind) + 1;
  h = mix(h, hash_str(t.chan));
  h = mix(h, hash_str(t.other));
  h = mix(h, hash_str(t.label));
  auto absorb = [&](const TermRef& c, const std::string* bound) {
    h = mix(h, c->hash);
    for (const auto& f : c->free_chans)
      if (!bound || f != *bound) chans.insert(f);
    secs.insert(c->free_secvars.begin(), c->free_secvars.end());
  };
  switch (t.kind) {
    case Kind::close:
      chans.insert(t.chan);
      break;
    case Kind::wait:
    case Kind::select:
      chans.insert(t.chan);
      absorb(t.cont, nullptr);
      break;
    case Kind::cases:
      chans.insert(t.chan);
      for (const auto& [l, b] : t.branches) {
        h = mix(h, hash_str(l));
        absorb(b, nullptr);
      }
      break;
    case Kind::send:
      chans.insert(t.chan);
      chans.insert(t.other);
      absorb(t.cont, nullptr);
      break;
    case Kind::recv:
      chans.insert(t.chan);
      absorb(t.cont, &t.other);
      break;
    case Kind::fwd:
      chans.insert(t.chan);
      chans.insert(t.other);
      break;
    case Kind::spawn:
      h = mix(h, t.spawn_type->hash());
      h = mix(h, hash_sec(t.spawn_max));
      h = mix(h, hash_sec(t.spawn_run));
      h = mix(h, hash_str(t.callee));
      for (const auto& a : t.args) {
        h = mix(h, hash_str(a));
        chans.insert(a);
      }
      collect_vars(t.spawn_max, secs);
      collect_vars(t.spawn_run, secs);
      absorb(t.cont, &t.other);
      break;
  }
  t.hash = h;
  t.free_chans.assign(chans.begin(), chans.end());
  t.free_secvars.assign(secs.begin(), secs.end());
  return std::make_shared<const Term>(std::move(t));
}

TermRef Term::branch(const std::string& l) const {
  for (const auto& [k, b] : branches)
    if (k == l) return b;
  return nullptr;
}

bool term_equal(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.hash != b.hash || a.kind != b.kind || a.chan != b.chan || a.other != b.other || a.label != b.label)
    return false;
  if (a.branches.size() != b.branches.size()) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i)
    if (a.branches[i].first != b.branches[i].first || !term_equal(*a.branches[i].second, *b.branches[i].second))
      return false;
  if (a.kind == Term::Kind::spawn) {
    if (a.callee != b.callee || a.args != b.args || !(a.spawn_max == b.spawn_max) ||
        !(a.spawn_run == b.spawn_run) || !syntactic_equal(*a.spawn_type, *b.spawn_type))
      return false;
  }
  if (static_cast<bool>(a.cont) != static_cast<bool>(b.cont)) return false;
  return !a.cont || term_equal(*a.cont, *b.cont);
}

}  // namespace sill
