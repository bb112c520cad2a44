#include "sill/types.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace sill {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

TypeRef SessionType::make(SessionType t) {
  std::uint64_t h = static_cast<std::uint64_t>(t.kind_) + 1;
  for (const auto& [l, b] : t.branches_) {
    h = mix(h, std::hash<std::string>{}(l));
    h = mix(h, b->hash());
  }
  if (t.payload_) h = mix(h, t.payload_->hash());
  if (t.cont_) h = mix(h, t.cont_->hash());
  if (!t.name_.empty()) h = mix(h, std::hash<std::string>{}(t.name_));
  t.hash_ = h;
  return std::make_shared<const SessionType>(std::move(t));
}

TypeRef SessionType::one(SourcePos pos) {
  SessionType t;
  t.kind_ = Kind::one;
  t.pos_ = pos;
  return make(std::move(t));
}

static Branches sorted(Branches bs) {
  std::sort(bs.begin(), bs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return bs;
}

TypeRef SessionType::plus(Branches bs, SourcePos pos) {
  SessionType t;
  t.kind_ = Kind::plus;
  t.branches_ = sorted(std::move(bs));
  t.pos_ = pos;
  return make(std::move(t));
}

TypeRef SessionType::with(Branches bs, SourcePos pos) {
  SessionType t;
  t.kind_ = Kind::with;
  t.branches_ = sorted(std::move(bs));
  t.pos_ = pos;
  return make(std::move(t));
}

TypeRef SessionType::tensor(TypeRef payload, TypeRef cont, SourcePos pos) {
  SessionType t;
  t.kind_ = Kind::tensor;
  t.payload_ = std::move(payload);
  t.cont_ = std::move(cont);
  t.pos_ = pos;
  return make(std::move(t));
}

TypeRef SessionType::lolli(TypeRef payload, TypeRef cont, SourcePos pos) {
  SessionType t;
  t.kind_ = Kind::lolli;
  t.payload_ = std::move(payload);
  t.cont_ = std::move(cont);
  t.pos_ = pos;
  return make(std::move(t));
}

TypeRef SessionType::named(std::string name, SourcePos pos) {
  SessionType t;
  t.kind_ = Kind::named;
  t.name_ = std::move(name);
  t.pos_ = pos;
  return make(std::move(t));
}

TypeRef SessionType::branch(const std::string& label) const {
  for (const auto& [l, b] : branches_)
    if (l == label) return b;
  return nullptr;
}

bool syntactic_equal(const SessionType& a, const SessionType& b) {
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case SessionType::Kind::one:
      return true;
    case SessionType::Kind::named:
      return a.name() == b.name();
    case SessionType::Kind::plus:
    case SessionType::Kind::with:
      if (a.branches().size() != b.branches().size()) return false;
      for (std::size_t i = 0; i < a.branches().size(); ++i)
        if (a.branches()[i].first != b.branches()[i].first ||
            !syntactic_equal(*a.branches()[i].second, *b.branches()[i].second))
          return false;
      return true;
    default:
      return syntactic_equal(*a.payload(), *b.payload()) && syntactic_equal(*a.cont(), *b.cont());
  }
}

void TypeTable::define(std::string name, TypeRef body) {
  if (!defs_.count(name)) order_.push_back(name);
  defs_[std::move(name)] = std::move(body);
}

const TypeRef& TypeTable::lookup(const std::string& name) const {
  auto it = defs_.find(name);
  if (it == defs_.end()) throw UnboundTypeError("unbound type name `" + name + "`");
  return it->second;
}

TypeRef unfold(const TypeTable& t, const TypeRef& a) {
  if (a->kind() == SessionType::Kind::named) return t.lookup(a->name());
  return a;
}

TypeRef head(const TypeTable& t, const TypeRef& a) {
  TypeRef cur = a;
  std::size_t guard = 0;
  while (cur->kind() == SessionType::Kind::named) {
    cur = t.lookup(cur->name());
    if (++guard > t.order().size() + 1) throw UnboundTypeError("non-contractive type `" + a->name() + "`");
  }
  return cur;
}

ContractivenessResult is_contractive(const TypeTable& t) {
  for (const auto& n : t.order()) {
    std::set<std::string> seen{n};
    TypeRef cur = t.lookup(n);
    while (cur->kind() == SessionType::Kind::named) {
      if (!seen.insert(cur->name()).second) return {false, n};
      if (!t.contains(cur->name())) break;
      cur = t.lookup(cur->name());
    }
  }
  return {};
}

bool type_equal(const TypeTable& t, const TypeRef& a, const TypeRef& b) {
  std::set<std::pair<const SessionType*, const SessionType*>> assumed;
  std::function<bool(const TypeRef&, const TypeRef&)> eq = [&](const TypeRef& x0, const TypeRef& y0) {
    TypeRef x = head(t, x0);
    TypeRef y = head(t, y0);
    if (x == y) return true;
    if (!assumed.insert({x.get(), y.get()}).second) return true;
    if (x->kind() != y->kind()) return false;
    switch (x->kind()) {
      case SessionType::Kind::one:
        return true;
      case SessionType::Kind::plus:
      case SessionType::Kind::with: {
        const auto& bx = x->branches();
        const auto& by = y->branches();
        if (bx.size() != by.size()) return false;
        for (std::size_t i = 0; i < bx.size(); ++i)
          if (bx[i].first != by[i].first) return false;
        for (std::size_t i = 0; i < bx.size(); ++i)
          if (!eq(bx[i].second, by[i].second)) return false;
        return true;
      }
      case SessionType::Kind::tensor:
      case SessionType::Kind::lolli:
        return eq(x->payload(), y->payload()) && eq(x->cont(), y->cont());
      case SessionType::Kind::named:
        break;
    }
    return false;
  };
  return eq(a, b);
}

const char* kind_name(SessionType::Kind k) {
  switch (k) {
    case SessionType::Kind::one: return "1";
    case SessionType::Kind::plus: return "⊕";
    case SessionType::Kind::with: return "&";
    case SessionType::Kind::tensor: return "⊗";
    case SessionType::Kind::lolli: return "⊸";
    case SessionType::Kind::named: return "named";
  }
  return "?";
}

}  // namespace sill
