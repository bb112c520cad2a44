#include "sill/checker.hpp"

#include <set>

namespace sill {

const char* kind_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::linearity:
      return "linearity";
    case TypeError::Kind::constraint_unentailed:
      return "constraint-unentailed";
    case TypeError::Kind::type_mismatch:
      return "type-mismatch";
    case TypeError::Kind::tree_invariant:
      return "tree-invariant";
    case TypeError::Kind::spawn_substitution:
      return "spawn-substitution";
    case TypeError::Kind::signature:
      return "signature";
    case TypeError::Kind::configuration:
      return "configuration";
  }
  return "?";
}

std::string TypeError::render(std::string_view file) const {
  std::string out = std::string(file) + ":" + std::to_string(pos_.line) + ":" + std::to_string(pos_.col) + ": " +
                    kind_name(kind_) + ": " + what();
  if (!constraint_text_.empty()) {
    out += " (constraint: " + constraint_text_;
    if (!concrete_text_.empty() && concrete_text_ != constraint_text_) out += ", i.e. " + concrete_text_;
    out += ")";
  }
  return out;
}

namespace {

using K = TypeError::Kind;

class Checker {
 public:
  Checker(const Signature& sig, const ExtendedLattice& psi) : sig_(sig), psi_(psi), lat_(psi.lattice()) {}

  bool leq(const SecTerm& a, const SecTerm& b) {
    SecTerm na = normalize(a, lat_), nb = normalize(b, lat_);
    auto key = std::make_pair(na, nb);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool r;
    try {
      r = entails(psi_, {na, nb});
    } catch (const LatticeError& e) {
      throw TypeError(K::constraint_unentailed, pos_, e.what());
    }
    memo_.emplace(key, r);
    return r;
  }

  [[noreturn]] void unentailed(K kind, SourcePos pos, const std::string& msg, const Constraint& c) {
    std::string text = to_string(Constraint{normalize(c.lhs, lat_), normalize(c.rhs, lat_)}, lat_);
    std::string concrete;
    auto l = concretize(psi_, c.lhs);
    auto r = concretize(psi_, c.rhs);
    if (l && r) concrete = lat_.name(*l) + " ⊑ " + lat_.name(*r);
    throw TypeError(kind, pos, msg, c, text, concrete);
  }

  void require(K kind, SourcePos pos, const std::string& msg, const SecTerm& a, const SecTerm& b) {
    if (!leq(a, b)) unentailed(kind, pos, msg, {a, b});
  }

  void require_eq(K kind, SourcePos pos, const std::string& msg, const SecTerm& a, const SecTerm& b) {
    require(kind, pos, msg, a, b);
    require(kind, pos, msg, b, a);
  }

  [[noreturn]] void mismatch(SourcePos pos, const std::string& msg) { throw TypeError(K::type_mismatch, pos, msg); }

  TypeRef hd(const TypeRef& t) { return head(sig_.types, t); }

  std::string show(const TypeRef& t);

  void invariant(const TypingCtx& ctx, const SecTerm& run, const Offer& off, SourcePos pos) {
    for (const auto& [n, e] : ctx)
      require(K::tree_invariant, pos, "channel `" + n + "` is more secret than the offered channel `" + off.name + "`",
              e.sec, off.sec);
    require(K::tree_invariant, pos, "running secrecy exceeds the maximal secrecy of `" + off.name + "`", run,
            off.sec);
  }

  CtxEntry& use(TypingCtx& ctx, const std::string& x, const Term& t) {
    auto it = ctx.find(x);
    if (it == ctx.end())
      throw TypeError(K::linearity, t.pos, "channel `" + x + "` is not available in the context");
    return it->second;
  }

  void check(TypingCtx ctx, const Term& t, SecTerm run, Offer off) {
    pos_ = t.pos;
    invariant(ctx, run, off, t.pos);
    const bool right = t.chan == off.name;
    switch (t.kind) {
      case Term::Kind::close: {
        if (!right) mismatch(t.pos, "`close " + t.chan + "` must act on the offered channel `" + off.name + "`");
        if (hd(off.type)->kind() != SessionType::Kind::one)
          mismatch(t.pos, "`close` on `" + t.chan + "` of type " + show(off.type));
        if (!ctx.empty()) throw TypeError(K::linearity, t.pos, "channel `" + ctx.begin()->first + "` is never used");
        return;
      }
      case Term::Kind::wait: {
        if (right) mismatch(t.pos, "`wait` on the offered channel `" + t.chan + "`");
        auto e = use(ctx, t.chan, t);
        if (hd(e.type)->kind() != SessionType::Kind::one)
          mismatch(t.pos, "`wait` on `" + t.chan + "` of type " + show(e.type));
        ctx.erase(t.chan);
        check(std::move(ctx), *t.cont, SecTerm::join(run, e.sec), std::move(off));
        return;
      }
      case Term::Kind::select: {
        if (right) {
          auto h = hd(off.type);
          if (h->kind() != SessionType::Kind::plus)
            mismatch(t.pos, "selection on `" + t.chan + "` of type " + show(off.type));
          auto b = h->branch(t.label);
          if (!b) mismatch(t.pos, "label `" + t.label + "` is not offered by " + show(off.type));
          off.type = b;
        } else {
          auto& e = use(ctx, t.chan, t);
          auto h = hd(e.type);
          if (h->kind() != SessionType::Kind::with)
            mismatch(t.pos, "selection on `" + t.chan + "` of type " + show(e.type));
          auto b = h->branch(t.label);
          if (!b) mismatch(t.pos, "label `" + t.label + "` is not offered by " + show(e.type));
          require(K::constraint_unentailed, t.pos, "sending label `" + t.label + "` on `" + t.chan + "`", run, e.sec);
          e.type = b;
        }
        check(std::move(ctx), *t.cont, std::move(run), std::move(off));
        return;
      }
      case Term::Kind::cases: {
        TypeRef h;
        SecTerm next;
        if (right) {
          h = hd(off.type);
          if (h->kind() != SessionType::Kind::with)
            mismatch(t.pos, "case on `" + t.chan + "` of type " + show(off.type));
          next = off.sec;
        } else {
          const auto& e = use(ctx, t.chan, t);
          h = hd(e.type);
          if (h->kind() != SessionType::Kind::plus)
            mismatch(t.pos, "case on `" + t.chan + "` of type " + show(e.type));
          next = SecTerm::join(run, e.sec);
        }
        same_labels(t, *h);
        for (const auto& [l, body] : t.branches) {
          TypingCtx c2 = ctx;
          Offer o2 = off;
          if (right)
            o2.type = h->branch(l);
          else
            c2.at(t.chan).type = h->branch(l);
          check(std::move(c2), *body, next, std::move(o2));
        }
        return;
      }
      case Term::Kind::send: {
        const auto& w = use(ctx, t.other, t);
        TypeRef payload_type = w.type;
        SecTerm payload_sec = w.sec;
        if (right) {
          auto h = hd(off.type);
          if (h->kind() != SessionType::Kind::tensor)
            mismatch(t.pos, "send on `" + t.chan + "` of type " + show(off.type));
          if (!type_equal(sig_.types, h->payload(), payload_type))
            mismatch(t.pos, "sent channel `" + t.other + "` has type " + show(payload_type) + ", expected " +
                                show(h->payload()));
          require_eq(K::constraint_unentailed, t.pos,
                     "sent channel `" + t.other + "` and carrier `" + t.chan + "` must have equal secrecy", payload_sec,
                     off.sec);
          off.type = h->cont();
        } else {
          auto& e = use(ctx, t.chan, t);
          auto h = hd(e.type);
          if (h->kind() != SessionType::Kind::lolli)
            mismatch(t.pos, "send on `" + t.chan + "` of type " + show(e.type));
          if (!type_equal(sig_.types, h->payload(), payload_type))
            mismatch(t.pos, "sent channel `" + t.other + "` has type " + show(payload_type) + ", expected " +
                                show(h->payload()));
          require(K::constraint_unentailed, t.pos, "sending on `" + t.chan + "`", run, e.sec);
          require_eq(K::constraint_unentailed, t.pos,
                     "sent channel `" + t.other + "` and carrier `" + t.chan + "` must have equal secrecy", payload_sec,
                     e.sec);
          e.type = h->cont();
        }
        ctx.erase(t.other);
        check(std::move(ctx), *t.cont, std::move(run), std::move(off));
        return;
      }
      case Term::Kind::recv: {
        if (ctx.count(t.other) || t.other == off.name)
          throw TypeError(K::linearity, t.pos, "channel `" + t.other + "` is already bound");
        if (right) {
          auto h = hd(off.type);
          if (h->kind() != SessionType::Kind::lolli)
            mismatch(t.pos, "receive on `" + t.chan + "` of type " + show(off.type));
          ctx[t.other] = {h->payload(), off.sec};
          run = off.sec;
          off.type = h->cont();
        } else {
          auto& e = use(ctx, t.chan, t);
          auto h = hd(e.type);
          if (h->kind() != SessionType::Kind::tensor)
            mismatch(t.pos, "receive on `" + t.chan + "` of type " + show(e.type));
          e.type = h->cont();
          SecTerm c = e.sec;
          ctx[t.other] = {h->payload(), c};
          run = SecTerm::join(run, c);
        }
        check(std::move(ctx), *t.cont, std::move(run), std::move(off));
        return;
      }
      case Term::Kind::fwd: {
        if (!right) mismatch(t.pos, "`fwd " + t.chan + " " + t.other + "` must forward the offered channel");
        const auto& e = use(ctx, t.other, t);
        if (ctx.size() != 1) {
          for (const auto& [n, _] : ctx)
            if (n != t.other) throw TypeError(K::linearity, t.pos, "channel `" + n + "` is never used");
        }
        if (!type_equal(sig_.types, off.type, e.type))
          mismatch(t.pos, "forwarding `" + t.other + "` of type " + show(e.type) + " as " + show(off.type));
        require_eq(K::constraint_unentailed, t.pos, "forwarded channels must have equal secrecy", e.sec, off.sec);
        require(K::constraint_unentailed, t.pos, "forwarding at a running secrecy above the offered channel", run,
                off.sec);
        return;
      }
      case Term::Kind::spawn: {
        if (ctx.count(t.other) || t.other == off.name)
          throw TypeError(K::linearity, t.pos, "channel `" + t.other + "` is already bound");
        spawn(ctx, t, run, off.sec);
        for (const auto& a : t.args) ctx.erase(a);
        ctx[t.other] = {t.spawn_type, t.spawn_max};
        check(std::move(ctx), *t.cont, std::move(run), std::move(off));
        return;
      }
    }
  }

  Substitution spawn(const TypingCtx& ctx, const Term& t, const SecTerm& run, const SecTerm& offer_max) {
    pos_ = t.pos;
    const ProcDef* callee = sig_.find_proc(t.callee);
    if (!callee) throw TypeError(K::spawn_substitution, t.pos, "unknown process `" + t.callee + "`");
    if (callee->ctx.size() != t.args.size())
      throw TypeError(K::spawn_substitution, t.pos, "`" + t.callee + "` expects " +
                                                        std::to_string(callee->ctx.size()) + " arguments");
    std::vector<SecTerm> arg_secs;
    std::set<std::string> seen;
    for (const auto& a : t.args) {
      auto it = ctx.find(a);
      if (it == ctx.end() || !seen.insert(a).second)
        throw TypeError(K::linearity, t.pos, "argument `" + a + "` is not available in the context");
      arg_secs.push_back(it->second.sec);
    }
    auto eq = [&](const SecTerm& a, const SecTerm& b) { return leq(a, b) && leq(b, a); };
    auto m = match_callee(*callee, arg_secs, t.spawn_max, t.spawn_run, eq);
    if (auto* f = std::get_if<MatchFailure>(&m)) throw TypeError(K::spawn_substitution, t.pos, f->message);
    Substitution g = std::get<Substitution>(m);
    for (const auto& c : callee->psi.constraints) {
      Constraint inst = apply_subst(g, c, lat_);
      if (!leq(inst.lhs, inst.rhs))
        unentailed(K::constraint_unentailed, t.pos,
                   "spawn of `" + t.callee + "` cannot satisfy its constraint " + to_string(c, lat_), inst);
    }
    require(K::constraint_unentailed, t.pos,
            "spawn of `" + t.callee + "` runs below the caller's running secrecy", run, t.spawn_run);
    require(K::tree_invariant, t.pos,
            "spawned channel `" + t.other + "` is more secret than the caller's offered channel", t.spawn_max,
            offer_max);
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      const auto& a = ctx.at(t.args[i]);
      if (!type_equal(sig_.types, a.type, callee->ctx[i].type))
        mismatch(t.pos, "argument `" + t.args[i] + "` has type " + show(a.type) + ", `" + t.callee + "` expects " +
                            show(callee->ctx[i].type));
    }
    if (!type_equal(sig_.types, t.spawn_type, callee->offered.type))
      mismatch(t.pos, "spawned channel declared " + show(t.spawn_type) + " but `" + t.callee + "` offers " +
                          show(callee->offered.type));
    return g;
  }

 private:
  void same_labels(const Term& t, const SessionType& h) {
    std::set<std::string> a, b;
    for (const auto& [l, _] : t.branches) a.insert(l);
    for (const auto& [l, _] : h.branches()) b.insert(l);
    if (a != b) {
      for (const auto& l : b)
        if (!a.count(l)) mismatch(t.pos, "case on `" + t.chan + "` is missing branch `" + l + "`");
      for (const auto& l : a)
        if (!b.count(l)) mismatch(t.pos, "case on `" + t.chan + "` has unexpected branch `" + l + "`");
    }
  }

  const Signature& sig_;
  const ExtendedLattice& psi_;
  const SecurityLattice& lat_;
  SourcePos pos_;
  std::map<std::pair<SecTerm, SecTerm>, bool> memo_;
};

std::string Checker::show(const TypeRef& t) {
  switch (t->kind()) {
    case SessionType::Kind::one:
      return "1";
    case SessionType::Kind::named:
      return t->name();
    case SessionType::Kind::plus:
    case SessionType::Kind::with: {
      std::string s = t->kind() == SessionType::Kind::plus ? "+{" : "&{";
      bool first = true;
      for (const auto& [l, b] : t->branches()) {
        if (!first) s += ", ";
        first = false;
        s += l + ": " + show(b);
      }
      return s + "}";
    }
    case SessionType::Kind::tensor:
      return "(" + show(t->payload()) + " * " + show(t->cont()) + ")";
    case SessionType::Kind::lolli:
      return "(" + show(t->payload()) + " -o " + show(t->cont()) + ")";
  }
  return "?";
}

}  // namespace

std::optional<TypeError> check_process(const Signature& sig, const ExtendedLattice& psi, const TypingCtx& ctx,
                                       const Term& p, const SecTerm& run, const Offer& offer) {
  try {
    Checker(sig, psi).check(ctx, p, run, offer);
  } catch (const TypeError& e) {
    return e;
  }
  return std::nullopt;
}

std::variant<Substitution, TypeError> infer_spawn_subst(const Signature& sig, const ExtendedLattice& psi,
                                                        const TypingCtx& ctx, const Term& spawn,
                                                        const SecTerm& run, const SecTerm& offer_max) {
  try {
    return Checker(sig, psi).spawn(ctx, spawn, run, offer_max);
  } catch (const TypeError& e) {
    return e;
  }
}

std::optional<TypeError> check_definition(const Signature& sig, const ProcDef& d) {
  if (!concrete_agrees(d.psi))
    return TypeError(K::signature, d.pos,
                     "constraints of `" + d.name + "` relate security levels differently from the lattice");
  try {
    Checker c(sig, d.psi);
    auto req = [&](const SecTerm& a, const SecTerm& b, const std::string& what) {
      if (!c.leq(a, b)) c.unentailed(K::signature, d.pos, "`" + d.name + "`: " + what, {a, b});
    };
    req(d.running, d.offered.sec, "running secrecy must be below the offered channel");
    TypingCtx ctx;
    for (const auto& e : d.ctx) {
      req(e.sec, d.offered.sec, "channel `" + e.name + "` must be below the offered channel");
      ctx[e.name] = {e.type, e.sec};
    }
    c.check(std::move(ctx), *d.body, d.running, Offer{d.offered.name, d.offered.type, d.offered.sec});
  } catch (const TypeError& e) {
    return e;
  }
  return std::nullopt;
}

std::optional<TypeError> check_signature(const Signature& sig) {
  auto c = is_contractive(sig.types);
  if (!c.ok) return TypeError(K::signature, {}, "type `" + c.offender + "` is not contractive");
  for (const auto& n : sig.proc_order)
    if (auto e = check_definition(sig, sig.procs.at(n))) return e;
  return std::nullopt;
}

}  // namespace sill
