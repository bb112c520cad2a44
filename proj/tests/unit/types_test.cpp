#include "doctest.h"
#include "sill/types.hpp"
#include "support.hpp"

using namespace sill;

TEST_SUITE("types") {
  TEST_CASE("equi-recursive equality") {
    auto p = parse(std::string(kHeader) + R"(
type pin = +{tok1: pin, tok2: pin}
type pin2 = +{tok2: pin2, tok1: +{tok1: pin2, tok2: pin2}}
type other = +{tok1: other}
type stream = bit * stream
type bit = +{b0: 1, b1: 1}
)");
    const auto& t = p->sig.types;
    auto n = [](const char* s) { return SessionType::named(s); };
    CHECK(type_equal(t, n("pin"), n("pin2")));
    CHECK_FALSE(type_equal(t, n("pin"), n("other")));
    CHECK(type_equal(t, unfold(t, n("stream")), SessionType::tensor(n("bit"), n("stream"))));
    CHECK(head(t, n("pin"))->kind() == SessionType::Kind::plus);
    CHECK(head(t, n("pin"))->branch("tok1"));
    CHECK_FALSE(head(t, n("pin"))->branch("tok3"));
  }

  TEST_CASE("contractiveness") {
    auto ok = parse(std::string(kHeader) + "type a = +{x: a}\n");
    CHECK(is_contractive(ok->sig.types).ok);
    auto bad = parse(std::string(kHeader) + "type a = b\ntype b = a\n");
    CHECK_FALSE(is_contractive(bad->sig.types).ok);
  }

  TEST_CASE("branches are kept sorted") {
    auto t = SessionType::plus({{"z", SessionType::one()}, {"a", SessionType::one()}});
    REQUIRE(t->branches().size() == 2);
    CHECK(t->branches()[0].first == "a");
  }
}
