#pragma once

#include <string>

#include "json.hpp"

#include "sill/ast.hpp"

namespace sill {

// Canonical concrete syntax; parse_program(pretty_print(p)) is structurally p.
std::string pretty_print(const Program& p);
std::string pretty_print(const Signature& s);
std::string pretty_print(const Term& t, const SecurityLattice& l, int indent = 0);
std::string pretty_print(const SessionType& t);
std::string pretty_print(const SecTerm& t, const SecurityLattice& l);

nlohmann::json ast_json(const Program& p);

// Structural equality of whole programs (positions ignored).
bool program_equal(const Program& a, const Program& b);

}  // namespace sill
