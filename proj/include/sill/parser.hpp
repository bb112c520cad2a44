#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "sill/ast.hpp"

namespace sill {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { syntax, name, linearity };

  ParseError(Kind kind, SourcePos pos, const std::string& msg)
      : std::runtime_error(msg), kind_(kind), pos_(pos) {}

  Kind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  std::string render(std::string_view file) const;

 private:
  Kind kind_;
  SourcePos pos_;
};

Program parse_program(std::string_view source);
Program load_program(const std::string& path);

// Channel linearity over one process body; throws ParseError(linearity).
void lint_linearity(const Signature& sig, const ProcDef& def);

}  // namespace sill
