#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sill {

struct SourcePos {
  int line = 0;
  int col = 0;
};

class SessionType;
using TypeRef = std::shared_ptr<const SessionType>;
using Branches = std::vector<std::pair<std::string, TypeRef>>;

class SessionType {
 public:
  enum class Kind : std::uint8_t { one, plus, with, tensor, lolli, named };

  static TypeRef one(SourcePos pos = {});
  static TypeRef plus(Branches bs, SourcePos pos = {});
  static TypeRef with(Branches bs, SourcePos pos = {});
  static TypeRef tensor(TypeRef payload, TypeRef cont, SourcePos pos = {});
  static TypeRef lolli(TypeRef payload, TypeRef cont, SourcePos pos = {});
  static TypeRef named(std::string name, SourcePos pos = {});

  Kind kind() const { return kind_; }
  // Branches sorted by label.
  const Branches& branches() const { return branches_; }
  const TypeRef& payload() const { return payload_; }
  const TypeRef& cont() const { return cont_; }
  const std::string& name() const { return name_; }
  SourcePos pos() const { return pos_; }
  // Structural hash; Named hashes by name.
  std::uint64_t hash() const { return hash_; }

  TypeRef branch(const std::string& label) const;

 private:
  static TypeRef make(SessionType t);
  Kind kind_ = Kind::one;
  Branches branches_;
  TypeRef payload_;
  TypeRef cont_;
  std::string name_;
  SourcePos pos_;
  std::uint64_t hash_ = 0;
};

// Structural equality of the syntax trees (no unfolding).
bool syntactic_equal(const SessionType& a, const SessionType& b);

class TypeError;

class UnboundTypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TypeTable {
 public:
  void define(std::string name, TypeRef body);
  bool contains(const std::string& name) const { return defs_.count(name) != 0; }
  const TypeRef& lookup(const std::string& name) const;
  const std::vector<std::string>& order() const { return order_; }

 private:
  std::map<std::string, TypeRef> defs_;
  std::vector<std::string> order_;
};

// One step: Named(n) -> defs[n]; other types unchanged.
TypeRef unfold(const TypeTable& t, const TypeRef& a);
// Unfold until the head is a constructor. Requires a contractive table.
TypeRef head(const TypeTable& t, const TypeRef& a);

struct ContractivenessResult {
  bool ok = true;
  std::string offender;
};
ContractivenessResult is_contractive(const TypeTable& t);

bool type_equal(const TypeTable& t, const TypeRef& a, const TypeRef& b);

const char* kind_name(SessionType::Kind k);

}  // namespace sill
