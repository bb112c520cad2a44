#include "doctest.h"
#include "sill/harness.hpp"
#include "sill/security.hpp"
#include "support.hpp"

using namespace sill;

namespace {

struct Kiosk {
  std::shared_ptr<ChannelTable> chans = std::make_shared<ChannelTable>();
  Runtime rt1{load_example("ni_kiosk_tok1.sill"), chans};
  Runtime rt2{load_example("ni_kiosk_tok2.sill"), chans};
  SecLevel level(const char* n) const { return rt1.lattice().level(n); }
};

}  // namespace

TEST_SUITE("security") {
  TEST_CASE("interface projection") {
    Kiosk k;
    auto c = k.rt1.instantiate("kiosk");
    auto d = program_part(c);
    CHECK(project_ctx(d.uses, *k.chans, k.rt1.lattice(), k.level("guest")).size() == 1);
    CHECK(project_ctx(d.provides, *k.chans, k.rt1.lattice(), k.level("guest")).empty());
    CHECK(project_ctx(d.provides, *k.chans, k.rt1.lattice(), k.level("alice")).size() == 1);
  }

  TEST_CASE("quasi running secrecy") {
    Kiosk k;
    auto c = k.rt1.instantiate("kiosk");
    auto q = quasi_secrecy(k.rt1, c);
    REQUIRE(q.size() == c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) CHECK(q[i] == c.nodes[i].run);
  }

  TEST_CASE("the kiosk program is relevant at guest only through its public side") {
    Kiosk k;
    auto d = program_part(k.rt1.instantiate("kiosk"));
    auto guest = relevant_nodes(k.rt1, d, k.level("guest"));
    CHECK(guest.nodes.size() == 1);
    auto alice = relevant_nodes(k.rt1, d, k.level("alice"));
    CHECK(alice.nodes.size() == d.nodes.size());
  }

  TEST_CASE("projections of the two pins agree at guest") {
    Kiosk k;
    auto d1 = program_part(k.rt1.instantiate("kiosk"));
    auto d2 = program_part(k.rt2.instantiate("kiosk"));
    CHECK(proj_eq(k.rt1, d1, k.rt1, d1, k.level("guest")));
    CHECK(proj_eq(k.rt1, d1, k.rt2, d2, k.level("guest")));
    // Step both until the pin has produced its token; alice sees the difference.
    RunOptions o;
    o.steps = 60;
    auto r1 = run(k.rt1, d1, o);
    auto r2 = run(k.rt2, d2, o);
    CHECK(proj_eq(k.rt1, r1.final, k.rt2, r2.final, k.level("guest")));
    CHECK_FALSE(proj_eq(k.rt1, r1.final, k.rt2, r2.final, k.level("alice")));
  }

  TEST_CASE("projection listing") {
    Kiosk k;
    auto d = program_part(k.rt1.instantiate("kiosk"));
    auto s = show_projection(k.rt1, d, k.level("guest"));
    CHECK(s.find("observer guest") != std::string::npos);
    CHECK(s.find("⊑ξ") != std::string::npos);
    CHECK(s.find("⋢ξ") != std::string::npos);
  }
}
