#include <functional>

#include "doctest.h"
#include "sill/lattice.hpp"

using namespace sill;

namespace {

const std::vector<std::string> kLevels = {"guest", "alice", "bob", "bank"};
const std::vector<std::pair<std::string, std::string>> kOrder = {
    {"guest", "alice"}, {"alice", "bank"}, {"guest", "bob"}, {"bob", "bank"}};

// Reference order: reflexive-transitive closure of the generating edges.
struct Oracle {
  std::size_t n = kLevels.size();
  std::vector<std::vector<bool>> le;

  Oracle() : le(n, std::vector<bool>(n, false)) {
    auto idx = [](const std::string& s) {
      return static_cast<std::size_t>(std::find(kLevels.begin(), kLevels.end(), s) - kLevels.begin());
    };
    for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
    for (const auto& [a, b] : kOrder) le[idx(a)][idx(b)] = true;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (le[i][k] && le[k][j]) le[i][j] = true;
  }
  std::size_t lub(std::size_t a, std::size_t b) const {
    for (std::size_t c = 0; c < n; ++c) {
      if (!le[a][c] || !le[b][c]) continue;
      bool least = true;
      for (std::size_t d = 0; d < n; ++d)
        if (le[a][d] && le[b][d] && !le[c][d]) least = false;
      if (least) return c;
    }
    return n;
  }
  std::size_t glb(std::size_t a, std::size_t b) const {
    for (std::size_t c = 0; c < n; ++c) {
      if (!le[c][a] || !le[c][b]) continue;
      bool greatest = true;
      for (std::size_t d = 0; d < n; ++d)
        if (le[d][a] && le[d][b] && !le[d][c]) greatest = false;
      if (greatest) return c;
    }
    return n;
  }
};

SecurityLattice lattice() { return SecurityLattice::build(kLevels, kOrder); }

// Semantic entailment by enumerating every assignment of the variables.
bool oracle_entails(const ExtendedLattice& psi, const Constraint& goal) {
  const auto& l = psi.lattice();
  std::vector<SecLevel> all = l.levels();
  std::map<std::string, SecLevel> env;
  std::function<SecLevel(const SecTerm&)> eval = [&](const SecTerm& t) -> SecLevel {
    switch (t.kind()) {
      case SecTerm::Kind::literal:
        return t.level();
      case SecTerm::Kind::variable:
        return env.at(t.name());
      case SecTerm::Kind::join: {
        SecLevel r = l.bottom();
        for (const auto& o : t.operands()) r = l.join(r, eval(o));
        return r;
      }
      case SecTerm::Kind::meet: {
        SecLevel r = l.top();
        for (const auto& o : t.operands()) r = l.meet(r, eval(o));
        return r;
      }
    }
    return l.bottom();
  };
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == psi.vars.size()) {
      for (const auto& c : psi.constraints)
        if (!l.leq(eval(c.lhs), eval(c.rhs))) return true;
      return l.leq(eval(goal.lhs), eval(goal.rhs));
    }
    for (auto v : all) {
      env[psi.vars[i]] = v;
      if (!go(i + 1)) return false;
    }
    return true;
  };
  return go(0);
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("order, joins and meets agree with the closure of the edges") {
    auto l = lattice();
    Oracle o;
    for (std::size_t a = 0; a < o.n; ++a)
      for (std::size_t b = 0; b < o.n; ++b) {
        auto la = l.level(kLevels[a]), lb = l.level(kLevels[b]);
        CHECK(l.leq(la, lb) == o.le[a][b]);
        CHECK(l.name(l.join(la, lb)) == kLevels[o.lub(a, b)]);
        CHECK(l.name(l.meet(la, lb)) == kLevels[o.glb(a, b)]);
      }
  }

  TEST_CASE("frozen values") {
    auto l = lattice();
    CHECK(l.name(l.join(l.level("alice"), l.level("bob"))) == "bank");
    CHECK(l.name(l.meet(l.level("alice"), l.level("bob"))) == "guest");
    CHECK(l.name(l.top()) == "bank");
    CHECK(l.name(l.bottom()) == "guest");
    CHECK_FALSE(l.leq(l.level("alice"), l.level("bob")));
    CHECK(l.leq(l.level("guest"), l.level("bank")));
  }

  TEST_CASE("non-lattices are rejected") {
    CHECK_THROWS_AS(SecurityLattice::build({"a", "b"}, {}), LatticeError);
    CHECK_THROWS_AS(SecurityLattice::build({"a", "b", "c", "d"}, {{"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}}),
                    LatticeError);
  }

  TEST_CASE("terms normalize") {
    auto l = lattice();
    auto a = SecTerm::lit(l.level("alice")), b = SecTerm::lit(l.level("bob"));
    CHECK(*evaluate(normalize(SecTerm::join(a, b), l), l) == l.level("bank"));
    CHECK(*evaluate(normalize(SecTerm::meet(a, b), l), l) == l.level("guest"));
    auto v = SecTerm::var("psi");
    CHECK(normalize(SecTerm::join(v, v), l) == v);
    CHECK_FALSE(is_ground(SecTerm::join(v, a)));
  }

  TEST_CASE("entailment matches the assignment oracle") {
    auto base = std::make_shared<const SecurityLattice>(lattice());
    auto lit = [&](const char* n) { return SecTerm::lit(base->level(n)); };
    auto v = [](const char* n) { return SecTerm::var(n); };
    struct Case {
      std::vector<std::string> vars;
      std::vector<Constraint> hyps;
      Constraint goal;
      bool expected;
    };
    std::vector<Case> cases = {
        {{"p"}, {{v("p"), lit("alice")}}, {v("p"), lit("bank")}, true},
        {{"p"}, {{v("p"), lit("alice")}}, {v("p"), lit("bob")}, false},
        {{"p"}, {{lit("guest"), v("p")}, {v("p"), lit("guest")}}, {v("p"), lit("bob")}, true},
        {{"p", "q"}, {{v("q"), v("p")}, {v("p"), lit("alice")}}, {SecTerm::join(v("q"), v("p")), lit("alice")}, true},
        {{"p", "q"}, {}, {v("p"), SecTerm::join(v("p"), v("q"))}, true},
        {{"p", "q"}, {}, {SecTerm::meet(v("p"), v("q")), v("p")}, true},
        {{"p", "r"}, {{v("p"), v("r")}}, {lit("alice"), v("r")}, false},
        {{"p"}, {{lit("alice"), v("p")}}, {lit("guest"), v("p")}, true},
        {{"p", "r"}, {{v("r"), lit("guest")}, {lit("guest"), v("r")}, {v("p"), lit("alice")}, {lit("alice"), v("p")}},
         {v("p"), v("r")}, false},
        {{"p", "q"}, {{v("p"), v("q")}, {v("q"), v("p")}}, {v("q"), v("p")}, true},
    };
    for (const auto& c : cases) {
      ExtendedLattice psi{base, c.vars, c.hyps};
      CAPTURE(to_string(c.goal, *base));
      CHECK(oracle_entails(psi, c.goal) == c.expected);
      CHECK(entails(psi, c.goal) == c.expected);
    }
  }

  TEST_CASE("concrete agreement") {
    auto base = std::make_shared<const SecurityLattice>(lattice());
    auto lit = [&](const char* n) { return SecTerm::lit(base->level(n)); };
    ExtendedLattice ok{base, {"p"}, {{lit("guest"), SecTerm::var("p")}, {SecTerm::var("p"), lit("alice")}}};
    CHECK(concrete_agrees(ok));
    ExtendedLattice bad{base, {"p"}, {{lit("alice"), SecTerm::var("p")}, {SecTerm::var("p"), lit("guest")}}};
    CHECK_FALSE(concrete_agrees(bad));
    ExtendedLattice pinned{base, {"p"}, {{lit("bob"), SecTerm::var("p")}, {SecTerm::var("p"), lit("bob")}}};
    CHECK(concretize(pinned, SecTerm::var("p")) == base->level("bob"));
  }

  TEST_CASE("substitution") {
    auto base = std::make_shared<const SecurityLattice>(lattice());
    Substitution g;
    g.map.emplace("p", SecTerm::lit(base->level("alice")));
    auto t = apply_subst(g, SecTerm::join(SecTerm::var("p"), SecTerm::lit(base->level("bob"))), *base);
    CHECK(*evaluate(t, *base) == base->level("bank"));
  }
}
