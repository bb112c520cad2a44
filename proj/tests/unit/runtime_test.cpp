#include <set>

#include "doctest.h"
#include "sill/checker.hpp"
#include "sill/runtime.hpp"
#include "support.hpp"

using namespace sill;

namespace {

Runtime make_runtime(const char* file) {
  return Runtime(load_example(file), std::make_shared<ChannelTable>());
}

// Label of the positive label message on the named interface channel, looking
// through a poised root forward.
std::string label_on(const Runtime& rt, const Configuration& c, const std::string& chan) {
  for (const auto& i : c.provides) {
    if (rt.chans().name(i.chan.base) != chan) continue;
    Chan target = i.chan;
    for (const auto& n : c.nodes)
      if (n.is_proc() && n.offer == target && n.term->kind == Term::Kind::fwd) target = *n.lookup(n.term->other);
    for (const auto& n : c.nodes)
      if (n.is_msg() && n.mkind == MsgKind::label_pos && n.carrier == target) return n.label;
  }
  return "none on " + chan;
}

std::size_t count_procs(const Configuration& c) {
  std::size_t k = 0;
  for (const auto& n : c.nodes) k += n.is_proc();
  return k;
}

}  // namespace

TEST_SUITE("runtime") {
  TEST_CASE("instantiation") {
    auto rt = make_runtime("banking_world.sill");
    auto c = rt.instantiate("bank");
    CHECK(c.nodes.size() == rt.program().find_config("bank")->lines.size());
    CHECK(count_procs(c) == c.nodes.size());
    CHECK_FALSE(check_config(rt.sig(), rt.chans(), c));
    CHECK_THROWS_AS(rt.instantiate("nope"), RuntimeError);
  }

  TEST_CASE("dangling arguments become interface channels") {
    auto rt = make_runtime("finite.sill");
    auto c = rt.instantiate("asking");
    CHECK(c.uses.size() == 1);
    CHECK(rt.chans().name(c.uses[0].chan.base) == "q");
  }

  TEST_CASE("finite configurations compute the expected bits") {
    // Boolean model of each configuration.
    auto bit = [](bool b) { return std::string(b ? "b1" : "b0"); };
    bool zero = false, one = true;
    bool chain = !zero;
    bool parallel_b = one, parallel_d = !zero;
    bool handoff_x = !zero;

    auto rt = make_runtime("finite.sill");
    RunOptions o;
    auto r = run(rt, rt.instantiate("chain"), o);
    CHECK(r.poised);
    CHECK(count_procs(r.final) == 0);
    CHECK(label_on(rt, r.final, "c") == bit(chain));

    r = run(rt, rt.instantiate("parallel"), o);
    CHECK(count_procs(r.final) == 0);
    CHECK(label_on(rt, r.final, "b") == bit(parallel_b));
    CHECK(label_on(rt, r.final, "d") == bit(parallel_d));

    r = run(rt, rt.instantiate("handoff"), o);
    CHECK(label_on(rt, r.final, "x") == bit(handoff_x));
  }

  TEST_CASE("all schedules reach the same normal form") {
    auto rt = make_runtime("finite.sill");
    for (const char* cfg : {"chain", "parallel", "pair", "asking", "flipping", "handoff"}) {
      CAPTURE(cfg);
      auto c0 = rt.instantiate(cfg);
      RunOptions fifo;
      auto expected = run(rt, c0, fifo).final;
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RunOptions o;
        o.schedule = Schedule::random;
        o.seed = seed;
        std::size_t bad = 0;
        o.on_step = [&](const Configuration& c, const TraceEntry&) { bad += check_config(rt.sig(), rt.chans(), c).has_value(); };
        auto r = run(rt, c0, o);
        CHECK(bad == 0);
        CHECK(r.poised);
        CHECK(config_equal(r.final, expected));
        CHECK(r.final.hash() == expected.hash());
      }
    }
  }

  TEST_CASE("trace entries record each step") {
    auto rt = make_runtime("finite.sill");
    RunOptions o;
    auto r = run(rt, rt.instantiate("chain"), o);
    REQUIRE_FALSE(r.trace.empty());
    std::set<std::string> rules;
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      CHECK(r.trace[i].step == i);
      rules.insert(rule_name(r.trace[i].info.rule));
    }
    CHECK(r.trace.back().hash == r.final.hash());
    CHECK(rules.count(rule_name(Rule::fwd)));
    CHECK(rules.count(rule_name(Rule::plus_rcv)));
  }

  TEST_CASE("step budget") {
    auto rt = make_runtime("banking_world.sill");
    RunOptions o;
    o.steps = 25;
    auto r = run(rt, rt.instantiate("bank"), o);
    CHECK(r.trace.size() == 25);
    CHECK(r.budget_exhausted);
  }

  TEST_CASE("exhaustive exploration of a terminating configuration") {
    auto rt = make_runtime("finite.sill");
    auto ex = explore(rt, rt.instantiate("pair"), 64);
    CHECK(ex.complete);
    REQUIRE_FALSE(ex.layers.empty());
    std::set<std::uint64_t> finals;
    for (const auto& layer : ex.layers)
      for (const auto& c : layer)
        if (rt.enabled(c).empty()) {
          CHECK(rt.is_poised(c));
          finals.insert(c.hash());
        }
    CHECK(finals.size() == 1);
  }

  TEST_CASE("node hashes ignore birth stamps") {
    auto rt = make_runtime("finite.sill");
    auto a = rt.instantiate("chain");
    auto b = a;
    for (auto& n : b.nodes) n.uid += 100;
    CHECK(config_equal(a, b));
    CHECK(a.hash() == b.hash());
  }
}
