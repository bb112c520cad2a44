#include "doctest.h"
#include "sill/checker.hpp"
#include "support.hpp"

using namespace sill;

TEST_SUITE("checker") {
  TEST_CASE("the banking definitions are accepted") {
    auto p = load_example("banking.sill");
    CHECK(p->sig.procs.size() == 8);
    for (const auto& [name, def] : p->sig.procs) {
      CAPTURE(name);
      auto err = check_definition(p->sig, def);
      CHECK_MESSAGE(!err, (err ? err->what() : ""));
    }
  }

  TEST_CASE("well-typed examples") {
    for (const char* f : {"banking_world.sill", "banking_world_tok2.sill", "finite.sill", "ni_kiosk_tok1.sill",
                          "ni_kiosk_tok2.sill", "ni_audit_tok1.sill", "ni_audit_tok2.sill"}) {
      CAPTURE(f);
      auto err = check_signature(load_example(f)->sig);
      CHECK_MESSAGE(!err, (err ? err->what() : ""));
    }
  }

  TEST_CASE("leaky verifiers fail on the alice to guest flow") {
    for (const char* f : {"sneaky1.sill", "sneaky2.sill", "sneaky3.sill", "sneaky_verifier.sill"}) {
      CAPTURE(f);
      auto err = check_signature(load_example(f)->sig);
      REQUIRE(err);
      CHECK(err->kind() == TypeError::Kind::constraint_unentailed);
      CHECK(err->constraint());
      CHECK(err->concrete_text() == "alice ⊑ guest");
      CHECK(err->render(f).find("⊑") != std::string::npos);
    }
  }

  TEST_CASE("branching on a secret before a public action is rejected") {
    for (const char* f : {"ni_leaky_tok1.sill", "ni_leaky_tok2.sill"}) {
      auto err = check_signature(load_example(f)->sig);
      REQUIRE(err);
      CHECK(err->concrete_text() == "alice ⊑ guest");
    }
  }

  TEST_CASE("non-contractive types are a signature error") {
    auto p = parse(std::string(kHeader) + "type t = t\n");
    auto err = check_signature(p->sig);
    REQUIRE(err);
    CHECK(err->kind() == TypeError::Kind::signature);
  }

  TEST_CASE("type mismatch") {
    auto p = parse(std::string(kHeader) + R"(
type bit = +{b0: 1, b1: 1}
proc Bad [psi' <= psi] () @psi' :: x: bit[psi] = x.b2; close x
)");
    auto err = check_signature(p->sig);
    REQUIRE(err);
    CHECK(err->kind() == TypeError::Kind::type_mismatch);
  }

  TEST_CASE("raising the running secrecy blocks later public sends") {
    auto p = parse(std::string(kHeader) + R"(
type bit = +{b0: 1, b1: 1}
proc Up [] (y: bit[alice]) @guest :: x: bit[guest] =
  case y (b0 => wait y; x.b0; close x | b1 => wait y; x.b1; close x)
)");
    auto err = check_signature(p->sig);
    REQUIRE(err);
    CHECK(err->concrete_text() == "alice ⊑ guest");
  }
}
