#include <random>
#include <set>

#include "doctest.h"
#include "sill/checker.hpp"
#include "sill/harness.hpp"
#include "sill/ni.hpp"
#include "support.hpp"

using namespace sill;

TEST_SUITE("harness") {
  TEST_CASE("program part") {
    Runtime rt(load_example("ni_kiosk_tok1.sill"), std::make_shared<ChannelTable>());
    auto c = rt.instantiate("kiosk");
    auto d = program_part(c);
    CHECK(d.nodes.size() == 1);
    CHECK(d.uses.size() == 1);
    CHECK(d.provides.size() == 1);
    CHECK_FALSE(check_config(rt.sig(), rt.chans(), d));
  }

  TEST_CASE("minimal sending configuration matches the oracle") {
    Runtime rt(load_example("finite.sill"), std::make_shared<ChannelTable>());
    for (const char* cfg : {"chain", "parallel", "pair", "handoff"}) {
      CAPTURE(cfg);
      auto d = rt.instantiate(cfg);
      std::vector<Chan> upsilon;
      for (const auto& u : d.provides) upsilon.push_back(u.chan);
      auto oracle = minimal_sending_oracle(rt, d, upsilon, 2000);
      REQUIRE(oracle);
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        RunOptions o;
        o.schedule = seed ? Schedule::random : Schedule::fifo;
        o.seed = seed;
        auto r = run(rt, d, o);
        std::vector<StepInfo> witness;
        for (const auto& t : r.trace) witness.push_back(t.info);
        auto m = minimal_sending(rt, d, upsilon, witness);
        CHECK(config_equal(m, *oracle));
      }
    }
  }

  TEST_CASE("a witness that never sends is refused") {
    Runtime rt(load_example("finite.sill"), std::make_shared<ChannelTable>());
    auto d = rt.instantiate("chain");
    std::vector<Chan> upsilon{d.provides.at(0).chan};
    CHECK_THROWS_AS(minimal_sending(rt, d, upsilon, {}), RuntimeError);
  }

  TEST_CASE("the leaky kiosk is distinguished at guest") {
    NiOptions o;
    auto p1 = load_example("ni_leaky_tok1.sill");
    o.xi = p1->sig.lattice->level("guest");
    o.unchecked = true;
    o.bound = 2;
    auto rep = check_noninterference({{"tok1", p1}, {"tok2", load_example("ni_leaky_tok2.sill")}}, "kiosk", o);
    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].result.verdict == Verdict::distinguished);
    CHECK_FALSE(rep.pairs[0].result.counterexample.empty());
  }

  TEST_CASE("the banking pins are indistinguishable at guest") {
    NiOptions o;
    auto p1 = load_example("banking_world.sill");
    o.xi = p1->sig.lattice->level("guest");
    o.bound = 2;
    auto rep =
        check_noninterference({{"tok1", p1}, {"tok2", load_example("banking_world_tok2.sill")}}, "bank", o);
    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].result.verdict == Verdict::equivalent);
    CHECK(rep.inconclusive.empty());
  }

  TEST_CASE("ill-typed variants are refused unless unchecked") {
    NiOptions o;
    auto p1 = load_example("ni_leaky_tok1.sill");
    o.xi = p1->sig.lattice->level("guest");
    CHECK_THROWS(check_noninterference({{"a", p1}, {"b", load_example("ni_leaky_tok2.sill")}}, "kiosk", o));
  }
}

TEST_SUITE("contexts") {
  TEST_CASE("random contexts are deterministic and well typed") {
    auto p = load_example("ni_kiosk_tok1.sill");
    std::mt19937_64 a(5), b(5);
    auto t1 = random_context(*p, "kiosk", "kiosk_ctx0", a);
    auto t2 = random_context(*p, "kiosk", "kiosk_ctx0", b);
    CHECK(t1 == t2);
    auto q = std::make_shared<const Program>(extend_program(*p, t1));
    auto err = check_signature(q->sig);
    CHECK_MESSAGE(!err, (err ? err->what() : ""));
    Runtime rt(q, std::make_shared<ChannelTable>());
    auto c = rt.instantiate("kiosk_ctx0");
    CHECK_FALSE(check_config(rt.sig(), rt.chans(), c));
    CHECK(c.uses.empty());
  }

  TEST_CASE("different seeds vary the context") {
    auto p = parse(std::string(kHeader) + R"(
type bit = +{b0: 1, b1: 1}
proc Relay [psi' <= psi] (y: bit[psi]) @psi' :: x: bit[psi] =
  case y (b0 => x.b0; wait y; close x | b1 => x.b1; wait y; close x)
proc Fixed [] () @guest :: y: bit[guest] = y.b0; close y
config relay {
  below y: bit[guest] <- Fixed @guest <- ();
  x: bit[guest] <- Relay @guest <- (y);
}
)");
    std::set<std::string> seen;
    for (std::uint64_t s = 0; s < 8; ++s) {
      std::mt19937_64 g(s);
      auto text = random_context(*p, "relay", "k", g);
      CHECK_FALSE(check_signature(extend_program(*p, text).sig));
      seen.insert(text);
    }
    CHECK(seen.size() == 2);
  }

  TEST_CASE("unknown configuration") {
    auto p = load_example("ni_kiosk_tok1.sill");
    std::mt19937_64 g(0);
    CHECK_THROWS_AS(random_context(*p, "nope", "k", g), RuntimeError);
  }
}
