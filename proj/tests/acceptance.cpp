// One pass/fail line per acceptance criterion.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "sill/checker.hpp"
#include "sill/harness.hpp"
#include "sill/ni.hpp"
#include "sill/parser.hpp"
#include "sill/security.hpp"

using namespace sill;

namespace {

std::string example(const std::string& name) { return std::string(SILL_EXAMPLES) + "/" + name; }

std::shared_ptr<const Program> load(const std::string& name) {
  return std::make_shared<const Program>(load_program(example(name)));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double millis_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1: typechecking corpus

Outcome typing_corpus() {
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream os;
  bool ok = true;
  auto bank = load("banking.sill");
  auto e = check_signature(bank->sig);
  ok &= !e && bank->sig.procs.size() == 8;
  os << bank->sig.procs.size() << " banking definitions " << (e ? "rejected" : "accepted");
  for (const char* f : {"sneaky1.sill", "sneaky2.sill", "sneaky3.sill", "sneaky_verifier.sill"}) {
    auto p = load(f);
    auto err = check_signature(p->sig);
    bool named = err && !err->constraint_text().empty();
    ok &= named;
    os << "; " << f << ": " << (err ? (err->concrete_text().empty() ? err->constraint_text() : err->concrete_text())
                                    : std::string("accepted"));
  }
  double ms = millis_since(t0);
  ok &= ms < 1000;
  os << " (" << static_cast<int>(ms) << " ms)";
  return {ok, os.str()};
}

// ---- 2: preservation

Outcome preservation() {
  auto t0 = std::chrono::steady_clock::now();
  auto p = load("banking_world.sill");
  Runtime rt(p, std::make_shared<ChannelTable>());
  auto c = rt.instantiate("bank");
  std::ostringstream os;
  bool ok = !check_config(p->sig, rt.chans(), c);
  std::size_t checked = 0;
  for (auto sched : {Schedule::fifo, Schedule::random}) {
    RunOptions ro;
    ro.schedule = sched;
    ro.seed = 20240611;
    ro.steps = 1000;
    ro.on_step = [&](const Configuration& cur, const TraceEntry& t) {
      ++checked;
      if (!ok) return;
      if (auto e = check_config(p->sig, rt.chans(), cur)) {
        ok = false;
        os << (sched == Schedule::fifo ? "fifo" : "random") << " step " << t.step << ": " << e->what() << "; ";
      }
    };
    auto res = run(rt, c, ro);
    ok &= res.trace.size() == 1000;
  }
  double ms = millis_since(t0);
  ok &= ms < 10000;
  os << checked << " steps checked (" << static_cast<int>(ms) << " ms)";
  return {ok, os.str()};
}

// ---- 3: progress

Outcome progress() {
  auto t0 = std::chrono::steady_clock::now();
  auto p = load("banking_world.sill");
  Runtime rt(p, std::make_shared<ChannelTable>());
  auto ex = explore(rt, rt.instantiate("bank"), 6);
  std::size_t bad = 0;
  for (const auto& layer : ex.layers)
    for (const auto& s : layer)
      if (rt.enabled(s).empty() && !rt.is_poised(s)) ++bad;
  double ms = millis_since(t0);
  std::ostringstream os;
  os << ex.states << " states to depth " << ex.layers.size() - 1 << ", " << bad << " stuck (" << static_cast<int>(ms)
     << " ms)";
  return {bad == 0 && ms < 30000, os.str()};
}

// ---- 4: diamond and confluence

// Messages waiting at the interface, keyed by carrier.
std::map<Chan, std::string> interface_messages(const Runtime& rt, const Configuration& c) {
  std::map<Chan, std::string> out;
  auto outs = rt.ready_sets(c).outgoing;
  for (const auto& n : c.nodes)
    if (n.is_msg() && std::find(outs.begin(), outs.end(), n.carrier) != outs.end())
      out[n.carrier] = rt.show(n);
  return out;
}

Outcome diamond() {
  auto t0 = std::chrono::steady_clock::now();
  std::size_t pairs = 0, failures = 0;
  std::ostringstream os;
  auto p = load("banking_world.sill");
  Runtime rt(p, std::make_shared<ChannelTable>());
  auto ex = explore(rt, rt.instantiate("bank"), 5);
  for (const auto& layer : ex.layers)
    for (const auto& s : layer) {
      auto en = rt.enabled(s);
      if (en.size() < 2) continue;
      std::vector<std::set<std::uint64_t>> reach(en.size());
      for (std::size_t i = 0; i < en.size(); ++i) {
        auto c1 = rt.apply(s, en[i]);
        reach[i].insert(c1.hash());
        for (const auto& r : rt.enabled(c1)) reach[i].insert(rt.apply(c1, r).hash());
      }
      for (std::size_t i = 0; i < en.size(); ++i)
        for (std::size_t j = i + 1; j < en.size(); ++j) {
          ++pairs;
          bool meet = std::any_of(reach[i].begin(), reach[i].end(), [&](auto h) { return reach[j].count(h) != 0; });
          if (!meet) ++failures;
        }
    }
  os << pairs << " redex pairs, " << failures << " diverging";

  // Interface payloads agree across schedules.
  std::size_t compared = 0, disagreements = 0;
  auto fin = load("finite.sill");
  auto check_payloads = [&](const std::shared_ptr<const Program>& prog, const std::string& cfg, std::size_t steps) {
    Runtime r(prog, std::make_shared<ChannelTable>());
    auto c = r.instantiate(cfg);
    std::vector<std::map<Chan, std::string>> seen;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      RunOptions ro;
      ro.schedule = seed == 0 ? Schedule::fifo : Schedule::random;
      ro.seed = seed;
      ro.steps = steps;
      std::map<Chan, std::string> got = interface_messages(r, c);
      ro.on_step = [&](const Configuration& cur, const TraceEntry&) {
        for (auto& [ch, m] : interface_messages(r, cur)) got.emplace(ch, m);
      };
      auto res = run(r, c, ro);
      seen.push_back(std::move(got));
    }
    for (std::size_t k = 1; k < seen.size(); ++k)
      for (const auto& [ch, m] : seen[k]) {
        auto it = seen[0].find(ch);
        if (it == seen[0].end()) continue;
        ++compared;
        if (it->second != m) ++disagreements;
      }
  };
  for (const auto& cfg : fin->configs) check_payloads(fin, cfg.name, 500);
  check_payloads(load("ni_kiosk_tok1.sill"), "kiosk", 300);
  os << "; " << compared << " interface payloads compared, " << disagreements << " differ ("
     << static_cast<int>(millis_since(t0)) << " ms)";
  return {failures == 0 && disagreements == 0 && compared > 0, os.str()};
}

// ---- 5: minimal sending configurations

bool sends_all(const Configuration& c, const std::vector<Chan>& ups) {
  auto ids = sending_nodes(c, ups);
  std::set<Chan> got;
  for (const auto& n : c.nodes)
    if (std::find(ids.begin(), ids.end(), n.uid) != ids.end()) got.insert(n.is_msg() ? n.carrier : n.offer);
  return got.size() == std::set<Chan>(ups.begin(), ups.end()).size();
}

Outcome minimal_sending_check() {
  auto t0 = std::chrono::steady_clock::now();
  auto fin = load("finite.sill");
  Runtime rt(fin, std::make_shared<ChannelTable>());
  std::size_t instances = 0, agree = 0, independent = 0;
  std::ostringstream fails;
  for (const auto& cfg : fin->configs) {
    auto c = rt.instantiate(cfg.name);
    auto ex = explore_tree(rt, c, static_cast<std::size_t>(-1), 2000);
    if (!ex.complete) continue;
    std::set<Chan> outs;
    for (const auto& s : ex.states)
      for (auto ch : rt.ready_sets(s).outgoing) outs.insert(ch);
    std::vector<Chan> ov(outs.begin(), outs.end());
    std::vector<std::vector<Chan>> ups;
    for (auto ch : ov) ups.push_back({ch});
    for (std::size_t i = 0; i < ov.size(); ++i)
      for (std::size_t j = i + 1; j < ov.size(); ++j) ups.push_back({ov[i], ov[j]});
    for (const auto& u : ups) {
      std::optional<std::size_t> first;
      for (std::size_t i = 0; i < ex.states.size() && !first; ++i)
        if (sends_all(ex.states[i], u)) first = i;
      if (!first) continue;
      ++instances;
      auto oracle = minimal_sending_oracle(rt, c, u, 2000);
      auto alg = minimal_sending(rt, c, u, ex.path_to(*first));
      if (oracle && config_equal(alg, *oracle)) ++agree;
      else fails << " " << cfg.name << "/" << rt.chans().display(u[0]);
      // Other witnesses: the deepest sending state and random walks.
      bool same = true;
      for (std::size_t i = ex.states.size(); i-- > 0;)
        if (sends_all(ex.states[i], u)) {
          same &= config_equal(alg, minimal_sending(rt, c, u, ex.path_to(i)));
          break;
        }
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        std::mt19937_64 rng(seed);
        Configuration cur = c;
        std::vector<StepInfo> walk;
        std::size_t extra = seed % 3;
        while (true) {
          bool done = sends_all(cur, u);
          if (done && extra == 0) break;
          auto en = rt.enabled(cur);
          if (en.empty()) break;
          if (done) --extra;
          StepInfo si;
          cur = rt.apply(cur, en[std::uniform_int_distribution<std::size_t>(0, en.size() - 1)(rng)], &si);
          walk.push_back(std::move(si));
        }
        if (!sends_all(cur, u)) continue;
        same &= config_equal(alg, minimal_sending(rt, c, u, walk));
      }
      if (same) ++independent;
    }
  }
  std::ostringstream os;
  os << instances << " instances, " << agree << " equal the oracle, " << independent << " witness-independent";
  if (!fails.str().empty()) os << "; differing:" << fails.str();
  os << " (" << static_cast<int>(millis_since(t0)) << " ms)";
  return {instances >= 10 && agree == instances && independent == instances, os.str()};
}

// ---- 6: one-step simulation of projection equivalence

Outcome projection_simulation() {
  auto t0 = std::chrono::steady_clock::now();
  std::size_t triples = 0, zero = 0, one = 0;
  std::ostringstream dump;
  bool ok = true;
  struct Case {
    const char* a;
    const char* b;
    const char* config;
    const char* observer;
  };
  for (const Case& k : {Case{"ni_kiosk_tok1.sill", "ni_kiosk_tok2.sill", "kiosk", "guest"},
                        Case{"ni_audit_tok1.sill", "ni_audit_tok2.sill", "audit", "alice"}}) {
    auto chans = std::make_shared<ChannelTable>();
    auto p1 = load(k.a), p2 = load(k.b);
    Runtime r1(p1, chans), r2(p2, chans);
    SecLevel xi = *p1->sig.lattice->find(k.observer);
    auto init1 = program_part(r1.instantiate(k.config));
    auto init2 = program_part(r2.instantiate(k.config));
    if (!proj_eq(r1, init1, r2, init2, xi)) {
      dump << k.config << ": initial configurations are not projection-equal; ";
      ok = false;
      continue;
    }
    std::mt19937_64 rng(77);
    Configuration d1 = init1, d2 = init2;
    for (std::size_t n = 0, made = 0; made < 100 && ok; ++n) {
      // Alternate which side moves first.
      bool flip = n % 2 == 1;
      const Runtime& ra = flip ? r2 : r1;
      const Runtime& rb = flip ? r1 : r2;
      Configuration& da = flip ? d2 : d1;
      Configuration& db = flip ? d1 : d2;
      auto en = ra.enabled(da);
      if (en.empty() || da.nodes.size() > 60) {
        d1 = init1;
        d2 = init2;
        continue;
      }
      auto r = en[std::uniform_int_distribution<std::size_t>(0, en.size() - 1)(rng)];
      auto next = ra.apply(da, r);
      ++triples;
      ++made;
      auto eq = [&](const Configuration& x) {
        return flip ? proj_eq(r1, x, r2, next, xi) : proj_eq(r1, next, r2, x, xi);
      };
      if (eq(db)) {
        ++zero;
        da = std::move(next);
        continue;
      }
      std::optional<Configuration> resp;
      for (const auto& q : rb.enabled(db)) {
        auto cand = rb.apply(db, q);
        if (eq(cand)) {
          resp = std::move(cand);
          break;
        }
      }
      if (!resp) {
        ok = false;
        dump << "counterexample at " << k.observer << ": moving side\n"
             << ra.show(da) << "steps by " << rule_name(r.rule) << " to\n"
             << ra.show(next) << "other side\n"
             << rb.show(db);
        break;
      }
      ++one;
      da = std::move(next);
      db = std::move(*resp);
    }
  }
  std::ostringstream os;
  os << triples << " triples, " << zero << " answered by 0 steps, " << one << " by 1 step ("
     << static_cast<int>(millis_since(t0)) << " ms)";
  if (!ok) os << "\n" << dump.str();
  return {ok && triples >= 200, os.str()};
}

// ---- 7 and 8: noninterference harness

NiReport ni(const char* a, const char* b, const char* config, bool unchecked) {
  auto p1 = load(a);
  NiOptions o;
  o.xi = *p1->sig.lattice->find("guest");
  o.bound = 4;
  o.depth = 64;
  o.unchecked = unchecked;
  return check_noninterference({{a, p1}, {b, load(b)}}, config, o);
}

Outcome noninterference() {
  auto t0 = std::chrono::steady_clock::now();
  std::ostringstream os;
  auto bank = ni("banking_world.sill", "banking_world_tok2.sill", "bank", false);
  auto kiosk = ni("ni_kiosk_tok1.sill", "ni_kiosk_tok2.sill", "kiosk", false);
  auto leaky = ni("ni_leaky_tok1.sill", "ni_leaky_tok2.sill", "kiosk", true);
  const auto& b = bank.pairs.at(0).result;
  const auto& k = kiosk.pairs.at(0).result;
  const auto& l = leaky.pairs.at(0).result;
  double ms = millis_since(t0);
  os << "banking pair " << verdict_name(b.verdict) << ", kiosk pair " << verdict_name(k.verdict) << ", leaky pair "
     << verdict_name(l.verdict) << " (" << l.counterexample << ") (" << static_cast<int>(ms) << " ms)";
  bool ok = b.verdict == Verdict::equivalent && k.verdict == Verdict::equivalent &&
            l.verdict == Verdict::distinguished && !l.counterexample.empty() && ms < 60000;
  return {ok, os.str()};
}

Outcome divergence() {
  auto rep = ni("ni_sv2_tok1.sill", "ni_sv2_tok2.sill", "sv2", true);
  const auto& r = rep.pairs.at(0).result;
  std::ostringstream os;
  os << verdict_name(r.verdict) << ", divergent variant " << r.divergent_side << ", " << rep.inconclusive.size()
     << " inconclusive entries";
  if (!rep.inconclusive.empty()) os << ": " << rep.inconclusive.front();
  return {r.verdict == Verdict::inconclusive && r.divergent_side == 2 && rep.inconclusive.size() == 1, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"typechecking corpus", typing_corpus},
      {"preservation", preservation},
      {"progress", progress},
      {"diamond and confluence", diamond},
      {"minimal sending configurations", minimal_sending_check},
      {"projection simulation", projection_simulation},
      {"noninterference end to end", noninterference},
      {"divergence sensitivity", divergence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
