#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sill {

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SecLevel {
  std::uint32_t index = 0;
  auto operator<=>(const SecLevel&) const = default;
};

// Finite security lattice over named levels. Built from generating edges and
// validated to have all binary joins and meets.
class SecurityLattice {
 public:
  SecurityLattice() = default;

  static SecurityLattice build(
      const std::vector<std::string>& levels,
      const std::vector<std::pair<std::string, std::string>>& order);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  std::optional<SecLevel> find(std::string_view name) const;
  SecLevel level(std::string_view name) const;
  const std::string& name(SecLevel l) const;
  std::vector<SecLevel> levels() const;

  bool leq(SecLevel a, SecLevel b) const;
  SecLevel join(SecLevel a, SecLevel b) const;
  SecLevel meet(SecLevel a, SecLevel b) const;
  SecLevel top() const;
  SecLevel bottom() const;

  const std::vector<std::pair<std::string, std::string>>& edges() const { return edges_; }

 private:
  std::size_t at(SecLevel a, SecLevel b) const { return a.index * names_.size() + b.index; }
  void check(SecLevel l) const;

  std::vector<std::string> names_;
  std::vector<std::pair<std::string, std::string>> edges_;
  std::vector<std::uint8_t> leq_;
  std::vector<SecLevel> join_;
  std::vector<SecLevel> meet_;
};

inline bool leq_concrete(const SecurityLattice& l, SecLevel a, SecLevel b) { return l.leq(a, b); }
inline SecLevel join_concrete(const SecurityLattice& l, SecLevel a, SecLevel b) { return l.join(a, b); }
inline SecLevel meet_concrete(const SecurityLattice& l, SecLevel a, SecLevel b) { return l.meet(a, b); }

// Secrecy term: literal, variable, or n-ary join/meet. Terms built through
// normalize() are flattened, sorted and deduplicated.
class SecTerm {
 public:
  enum class Kind : std::uint8_t { literal, variable, join, meet };

  SecTerm() = default;
  static SecTerm lit(SecLevel l);
  static SecTerm var(std::string name);
  static SecTerm join(SecTerm a, SecTerm b);
  static SecTerm meet(SecTerm a, SecTerm b);
  static SecTerm nary(Kind k, std::vector<SecTerm> ops);

  Kind kind() const { return kind_; }
  SecLevel level() const { return level_; }
  const std::string& name() const { return name_; }
  const std::vector<SecTerm>& operands() const { return ops_; }

  bool is_literal() const { return kind_ == Kind::literal; }
  bool is_variable() const { return kind_ == Kind::variable; }

  std::strong_ordering operator<=>(const SecTerm& o) const;
  bool operator==(const SecTerm& o) const { return (*this <=> o) == 0; }

 private:
  Kind kind_ = Kind::literal;
  SecLevel level_{};
  std::string name_;
  std::vector<SecTerm> ops_;
};

SecTerm normalize(const SecTerm& t, const SecurityLattice& l);
std::string to_string(const SecTerm& t, const SecurityLattice& l);
void collect_vars(const SecTerm& t, std::set<std::string>& out);
bool is_ground(const SecTerm& t);
// Value of a ground term.
std::optional<SecLevel> evaluate(const SecTerm& t, const SecurityLattice& l);

struct Constraint {
  SecTerm lhs;
  SecTerm rhs;
  bool operator==(const Constraint&) const = default;
};

std::string to_string(const Constraint& c, const SecurityLattice& l);

struct ExtendedLattice {
  std::shared_ptr<const SecurityLattice> base;
  std::vector<std::string> vars;
  std::vector<Constraint> constraints;

  bool has_var(std::string_view v) const;
  const SecurityLattice& lattice() const { return *base; }
};

ExtendedLattice concrete_only(std::shared_ptr<const SecurityLattice> base);

bool entails(const ExtendedLattice& psi, const Constraint& c);
bool entails_all(const ExtendedLattice& psi, std::span<const Constraint> cs);
bool entails_eq(const ExtendedLattice& psi, const SecTerm& a, const SecTerm& b);
bool concrete_agrees(const ExtendedLattice& psi);
// When psi pins t to a single concrete level (t = c in both directions).
std::optional<SecLevel> concretize(const ExtendedLattice& psi, const SecTerm& t);

class SubstitutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Substitution {
  std::map<std::string, SecTerm> map;

  bool binds(const std::string& v) const { return map.count(v) != 0; }
  static Substitution identity(const std::vector<std::string>& vars);
};

SecTerm apply_subst(const Substitution& g, const SecTerm& t, const SecurityLattice& l);
Constraint apply_subst(const Substitution& g, const Constraint& c, const SecurityLattice& l);
ExtendedLattice apply_subst(const Substitution& g, const ExtendedLattice& psi);

// Reusable closure of a fixed extended lattice over a term universe.
class Entailment {
 public:
  Entailment(const ExtendedLattice& psi, std::span<const SecTerm> extra);
  bool leq(const SecTerm& a, const SecTerm& b) const;

 private:
  std::size_t index_of(const SecTerm& t) const;
  void add(const SecTerm& t);
  void saturate();

  const ExtendedLattice* psi_;
  std::vector<SecTerm> universe_;
  std::map<SecTerm, std::size_t> index_;
  std::vector<std::vector<bool>> rel_;
};

}  // namespace sill
