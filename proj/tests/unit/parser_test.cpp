#include <filesystem>

#include "doctest.h"
#include "sill/printer.hpp"
#include "support.hpp"

using namespace sill;

namespace {

ParseError::Kind parse_error_kind(std::string_view src) {
  try {
    parse_program(src);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error");
  return ParseError::Kind::syntax;
}

}  // namespace

TEST_SUITE("parser") {
  TEST_CASE("every example parses and round-trips through the printer") {
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(SILL_EXAMPLES)) {
      if (e.path().extension() != ".sill") continue;
      CAPTURE(e.path().string());
      Program p = load_program(e.path().string());
      Program q = parse_program(pretty_print(p));
      CHECK(program_equal(p, q));
      CHECK(pretty_print(q) == pretty_print(p));
      ++n;
    }
    CHECK(n >= 15);
  }

  TEST_CASE("declarations are collected") {
    auto p = load_example("banking_world.sill");
    CHECK(p->sig.lattice->size() == 4);
    CHECK(p->sig.find_proc("Bank"));
    CHECK(p->sig.types.contains("pin"));
    CHECK(p->find_config("bank"));
  }

  TEST_CASE("a tail call is a spawn followed by a forward") {
    auto p = parse(std::string(kHeader) + R"(
type bit = +{b0: 1, b1: 1}
proc Zero [psi' <= psi] () @psi' :: x: bit[psi] = x.b0; close x
proc Tail [psi' <= psi] () @psi' :: x: bit[psi] = x: bit[psi] <- Zero @psi' <- ()
)");
    const auto& body = *p->sig.find_proc("Tail")->body;
    REQUIRE(body.kind == Term::Kind::spawn);
    CHECK(body.callee == "Zero");
    REQUIRE(body.cont);
    CHECK(body.cont->kind == Term::Kind::fwd);
    CHECK(body.cont->chan == "x");
  }

  TEST_CASE("error kinds") {
    std::string h(kHeader);
    CHECK(parse_error_kind(h + "proc P [] () @guest :: x: 1[guest] = close") == ParseError::Kind::syntax);
    CHECK(parse_error_kind(h + "type t = nope\n") == ParseError::Kind::name);
    CHECK(parse_error_kind(h + "proc P [] () @guest :: x: 1[guest] = close x\n"
                               "proc Q [] () @guest :: x: 1[guest] = y: 1[guest] <- Missing @guest <- (); wait y; close x\n") ==
          ParseError::Kind::name);
    CHECK(parse_error_kind(h + "proc Drop [] (y: 1[guest]) @guest :: x: 1[guest] = close x\n") ==
          ParseError::Kind::linearity);
    CHECK(parse_error_kind("level a;\norder a <= b;\n") == ParseError::Kind::name);
  }

  TEST_CASE("errors carry positions") {
    try {
      parse_program("level guest;\n\ntype t = +{a: 1\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.pos().line >= 3);
      CHECK(e.render("f.sill").rfind("f.sill:", 0) == 0);
    }
  }

  TEST_CASE("empty source is an empty program") {
    Program p = parse_program("");
    CHECK(p.sig.procs.empty());
    CHECK(p.configs.empty());
  }

  TEST_CASE("ast json") {
    auto j = ast_json(*load_example("finite.sill"));
    CHECK(j.is_object());
    CHECK(j.dump().find("Relay") != std::string::npos);
  }
}
