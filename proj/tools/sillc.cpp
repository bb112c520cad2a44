#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sill/checker.hpp"
#include "sill/harness.hpp"
#include "sill/ni.hpp"
#include "sill/parser.hpp"
#include "sill/printer.hpp"
#include "sill/runtime.hpp"
#include "sill/security.hpp"

using json = nlohmann::json;
using namespace sill;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kOk = 0;
constexpr int kTypeError = 1;
constexpr int kNiFalse = 2;
constexpr int kNiInconclusive = 3;
constexpr int kUsage = 64;
constexpr int kParse = 65;
constexpr int kInternal = 70;

// Carries an exit code out of a subcommand.
struct Exit {
  int code;
};

std::shared_ptr<const Program> load(const std::string& path) {
  try {
    return std::make_shared<const Program>(load_program(path));
  } catch (const ParseError& e) {
    std::cerr << e.render(path) << "\n";
    throw Exit{e.kind() == ParseError::Kind::linearity ? kTypeError : kParse};
  }
}

SecLevel level(const Program& p, const std::string& name) {
  if (auto l = p.sig.lattice->find(name)) return *l;
  std::cerr << "unknown security level `" << name << "`\n";
  throw Exit{kParse};
}

const std::string& config_name(const Program& p, const std::string& want) {
  if (!want.empty()) {
    if (const auto* c = p.find_config(want)) return c->name;
    std::cerr << "no configuration named `" << want << "`\n";
    throw Exit{kParse};
  }
  if (p.configs.empty()) {
    std::cerr << "the program declares no configuration\n";
    throw Exit{kParse};
  }
  return p.configs.front().name;
}

void require_typed(const Program& p, const std::string& path) {
  if (auto e = check_signature(p.sig)) {
    std::cerr << e->render(path) << "\n";
    throw Exit{kTypeError};
  }
}

json error_json(const TypeError& e, const std::string& file) {
  json j{{"file", file},
         {"kind", kind_name(e.kind())},
         {"line", e.pos().line},
         {"column", e.pos().col},
         {"message", e.render(file)}};
  if (!e.constraint_text().empty()) j["constraint"] = e.constraint_text();
  if (!e.concrete_text().empty()) j["concrete"] = e.concrete_text();
  return j;
}

int cmd_check(const std::string& file, bool as_json) {
  auto p = load(file);
  auto e = check_signature(p->sig);
  if (as_json) {
    json j{{"schemaVersion", kSchemaVersion}, {"file", file}, {"ok", !e}};
    if (e) j["error"] = error_json(*e, file);
    std::cout << j.dump(2) << "\n";
  } else if (e) {
    std::cerr << e->render(file) << "\n";
  } else {
    std::cout << file << ": ok (" << p->sig.procs.size() << " definitions)\n";
  }
  return e ? kTypeError : kOk;
}

int cmd_print(const std::string& file, bool dump_ast) {
  auto p = load(file);
  if (dump_ast) {
    json j = ast_json(*p);
    j["schemaVersion"] = kSchemaVersion;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << pretty_print(*p);
  }
  return kOk;
}

struct RunArgs {
  std::string file;
  std::string config;
  std::string schedule = "fifo";
  std::uint64_t seed = 0;
  std::size_t steps = 1000;
  std::size_t depth = 6;
  std::string trace;
  bool check_each = false;
};

int cmd_run(const RunArgs& a) {
  auto p = load(a.file);
  require_typed(*p, a.file);
  Runtime rt(p, std::make_shared<ChannelTable>());
  auto c = rt.instantiate(config_name(*p, a.config));
  json out{{"schemaVersion", kSchemaVersion}, {"file", a.file}, {"schedule", a.schedule}};
  if (a.schedule == "exhaustive") {
    auto ex = explore(rt, c, a.depth);
    std::size_t stuck = 0;
    for (const auto& layer : ex.layers)
      for (const auto& s : layer)
        if (rt.enabled(s).empty() && !rt.is_poised(s)) ++stuck;
    out["states"] = ex.states;
    out["depth"] = ex.layers.empty() ? 0 : ex.layers.size() - 1;
    out["complete"] = ex.complete;
    out["stuckStates"] = stuck;
    std::cout << out.dump(2) << "\n";
    return stuck ? kInternal : kOk;
  }
  RunOptions ro;
  ro.schedule = a.schedule == "random" ? Schedule::random : Schedule::fifo;
  ro.seed = a.seed;
  ro.steps = a.steps;
  std::optional<std::size_t> violation;
  std::string violation_msg;
  if (a.check_each) {
    if (auto e = check_config(p->sig, rt.chans(), c)) violation = 0, violation_msg = e->what();
    ro.on_step = [&](const Configuration& cur, const TraceEntry& t) {
      if (violation) return;
      if (auto e = check_config(p->sig, rt.chans(), cur)) violation = t.step + 1, violation_msg = e->what();
    };
  }
  auto res = run(rt, c, ro);
  if (a.check_each) {
    out["preservation"] = !violation;
    if (violation) out["violation"] = {{"step", *violation}, {"message", violation_msg}};
  }
  const auto& lat = rt.lattice();
  if (!a.trace.empty()) {
    std::ofstream file;
    if (a.trace != "-") {
      file.open(a.trace);
      if (!file) {
        std::cerr << "cannot write " << a.trace << "\n";
        return kUsage;
      }
    }
    std::ostream& os = a.trace == "-" ? std::cout : file;
    for (const auto& t : res.trace) {
      json j{{"schemaVersion", kSchemaVersion},
             {"step", t.step},
             {"rule", rule_name(t.info.rule)},
             {"channel", rt.chans().name(t.info.channel.base)},
             {"gen", t.info.channel.gen},
             {"runSecBefore", lat.name(t.info.run_before)},
             {"runSecAfter", lat.name(t.info.run_after)},
             {"configHash", t.hash}};
      os << j.dump() << "\n";
    }
  }
  out["steps"] = res.trace.size();
  out["poised"] = res.poised;
  out["budgetExhausted"] = res.budget_exhausted;
  out["nodes"] = res.final.nodes.size();
  out["configHash"] = res.final.hash();
  std::cout << out.dump(2) << "\n";
  return violation ? kInternal : kOk;
}

int cmd_project(const std::string& file, const std::string& config, const std::string& observer,
                std::size_t steps, std::uint64_t seed) {
  auto p = load(file);
  require_typed(*p, file);
  Runtime rt(p, std::make_shared<ChannelTable>());
  auto c = rt.instantiate(config_name(*p, config));
  if (steps) {
    RunOptions ro;
    ro.schedule = Schedule::random;
    ro.seed = seed;
    ro.steps = steps;
    c = run(rt, c, ro).final;
  }
  std::cout << show_projection(rt, c, level(*p, observer));
  return kOk;
}

struct NiArgs {
  std::vector<std::string> files;
  std::string variants;
  std::string config;
  std::string observer;
  std::size_t bound = 4;
  std::size_t depth = 64;
  std::size_t max_states = 20000;
  std::string contexts = "declared";
  std::uint64_t seed = 0;
  std::size_t samples = 3;
  bool unchecked = false;
};

int cmd_ni(NiArgs a) {
  if (!a.variants.empty()) {
    std::stringstream ss(a.variants);
    std::string f;
    while (std::getline(ss, f, ','))
      if (!f.empty()) a.files.push_back(f);
  }
  if (a.files.size() < 2) {
    std::cerr << "ni needs at least two variants\n";
    return kUsage;
  }
  std::vector<NiVariant> vs;
  for (const auto& f : a.files) {
    auto p = load(f);
    if (!a.unchecked) require_typed(*p, f);
    vs.push_back({f, p});
  }
  NiOptions o;
  o.xi = level(*vs[0].program, a.observer);
  o.bound = a.bound;
  o.depth = a.depth;
  o.max_states = a.max_states;
  o.random_contexts = a.contexts == "random";
  o.seed = a.seed;
  o.samples = a.samples;
  o.unchecked = a.unchecked;
  auto cfg = config_name(*vs[0].program, a.config);
  auto rep = check_noninterference(vs, cfg, o);
  json pairs = json::array();
  bool any_false = false;
  bool any_incon = false;
  for (const auto& pr : rep.pairs) {
    json j{{"variants", {vs[pr.first].name, vs[pr.second].name}},
           {"context", pr.context},
           {"verdict", verdict_name(pr.result.verdict)}};
    if (pr.result.verdict != Verdict::equivalent) {
      j["counterexample"] = {{"trace", pr.result.trace}, {"action", pr.result.counterexample}};
      if (pr.result.divergent_side) j["divergentVariant"] = pr.result.divergent_side == 1 ? vs[pr.first].name : vs[pr.second].name;
    }
    any_false |= pr.result.verdict == Verdict::distinguished;
    any_incon |= pr.result.verdict == Verdict::inconclusive;
    pairs.push_back(std::move(j));
  }
  json out{{"schemaVersion", kSchemaVersion},
           {"observer", a.observer},
           {"bound", a.bound},
           {"depth", a.depth},
           {"contexts", a.contexts},
           {"pairs", pairs},
           {"inconclusive", rep.inconclusive}};
  std::cout << out.dump(2) << "\n";
  if (any_false) return kNiFalse;
  return any_incon ? kNiInconclusive : kOk;
}

int cmd_corpus(const std::vector<std::string>& inputs) {
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (std::filesystem::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : std::filesystem::directory_iterator(in))
        if (e.path().extension() == ".sill") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(in);
    }
  }
  json rows = json::array();
  bool broken = false;
  for (const auto& f : files) {
    auto t0 = std::chrono::steady_clock::now();
    json row{{"file", f}};
    try {
      auto p = load_program(f);
      auto e = check_signature(p.sig);
      row["accepted"] = !e;
      row["definitions"] = p.sig.procs.size();
      if (e) row["error"] = error_json(*e, f);
    } catch (const ParseError& e) {
      row["accepted"] = false;
      row["error"] = {{"kind", "parse"}, {"message", e.render(f)}};
      broken |= e.kind() != ParseError::Kind::linearity;
    }
    row["millis"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  }
  std::cout << json{{"schemaVersion", kSchemaVersion}, {"files", rows}}.dump(2) << "\n";
  return broken ? kParse : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checker, interpreter and noninterference harness for secure session programs"};
  app.require_subcommand(1);

  bool as_json = false;
  std::string file;
  auto* check = app.add_subcommand("check", "Typecheck every definition");
  check->add_option("file", file, "Program")->required()->check(CLI::ExistingFile);
  check->add_flag("--json", as_json, "Machine-readable result");

  bool dump_ast = false;
  auto* print = app.add_subcommand("print", "Pretty-print a program");
  print->add_option("file", file, "Program")->required()->check(CLI::ExistingFile);
  print->add_flag("--dump-ast", dump_ast, "Print the syntax tree as JSON");

  RunArgs ra;
  auto* runc = app.add_subcommand("run", "Execute a configuration");
  runc->add_option("file", ra.file, "Program")->required()->check(CLI::ExistingFile);
  runc->add_option("--config", ra.config, "Configuration name (default: first)");
  runc->add_option("--schedule", ra.schedule, "Scheduler")->check(CLI::IsMember({"fifo", "random", "exhaustive"}));
  runc->add_option("--seed", ra.seed, "Random seed");
  runc->add_option("--steps", ra.steps, "Step budget");
  runc->add_option("--depth", ra.depth, "Exhaustive depth");
  runc->add_option("--trace", ra.trace, "Write a JSONL step trace (- for stdout)");
  runc->add_flag("--check-config", ra.check_each, "Typecheck the configuration after every step");

  std::string pconfig, observer;
  std::size_t psteps = 0;
  std::uint64_t pseed = 0;
  auto* project = app.add_subcommand("project", "List the nodes an observer can see");
  project->add_option("file", file, "Program")->required()->check(CLI::ExistingFile);
  project->add_option("--config", pconfig, "Configuration name (default: first)");
  project->add_option("--observer", observer, "Observer level")->required();
  project->add_option("--steps", psteps, "Random steps to take first");
  project->add_option("--seed", pseed, "Seed for those steps");

  NiArgs na;
  auto* ni = app.add_subcommand("ni", "Compare program variants under an observer");
  ni->add_option("files", na.files, "Variant programs")->check(CLI::ExistingFile);
  ni->add_option("--variants", na.variants, "Comma-separated variant programs");
  ni->add_option("--config", na.config, "Configuration name (default: first)");
  ni->add_option("--observer", na.observer, "Observer level")->required();
  ni->add_option("--bound", na.bound, "Bisimulation bound m");
  ni->add_option("--depth", na.depth, "Internal exploration depth");
  ni->add_option("--max-states", na.max_states, "Exploration state cap");
  ni->add_option("--contexts", na.contexts, "Context source: the declared configuration or generated ones")->check(CLI::IsMember({"declared", "random"}));
  ni->add_option("--seed", na.seed, "Seed for random contexts");
  ni->add_option("--samples", na.samples, "Number of random contexts");
  ni->add_flag("--unchecked", na.unchecked, "Skip typechecking the variants");

  std::vector<std::string> inputs;
  auto* corpus = app.add_subcommand("corpus", "Typecheck a set of programs and report each");
  corpus->add_option("inputs", inputs, "Files or directories")->required();

  // `--dump-ast FILE` without a subcommand.
  if (argc == 3 && std::string(argv[1]) == "--dump-ast") {
    try {
      return cmd_print(argv[2], true);
    } catch (const Exit& e) {
      return e.code;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*check) return cmd_check(file, as_json);
    if (*print) return cmd_print(file, dump_ast);
    if (*runc) return cmd_run(ra);
    if (*project) return cmd_project(file, pconfig, observer, psteps, pseed);
    if (*ni) return cmd_ni(na);
    if (*corpus) return cmd_corpus(inputs);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
