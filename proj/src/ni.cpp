#include <deque>

#include "sill/checker.hpp"
#include "sill/ni.hpp"

namespace sill {

NiReport check_noninterference(const std::vector<NiVariant>& variants, const std::string& config,
                               const NiOptions& opt) {
  if (variants.size() < 2) throw RuntimeError("need at least two variants");
  std::vector<std::pair<std::string, std::string>> contexts;
  if (!opt.random_contexts) {
    contexts.emplace_back(config, "");
  } else {
    std::mt19937_64 rng(opt.seed);
    for (std::size_t k = 0; k < opt.samples; ++k) {
      std::string name = config + "_ctx" + std::to_string(k);
      contexts.emplace_back(name, random_context(*variants[0].program, config, name, rng));
    }
  }

  NiReport rep;
  for (const auto& [cname, extra] : contexts) {
    auto chans = std::make_shared<ChannelTable>();
    std::deque<Runtime> rts;
    std::deque<Harness> hs;
    std::vector<Configuration> starts;
    for (const auto& v : variants) {
      auto prog = extra.empty() ? v.program : std::make_shared<const Program>(extend_program(*v.program, extra));
      if (!opt.unchecked)
        if (auto e = check_signature(prog->sig))
          throw RuntimeError("variant " + v.name + " does not typecheck: " + e->what());
      rts.emplace_back(prog, chans);
      hs.emplace_back(rts.back(), HarnessOptions{opt.xi, opt.depth, opt.max_states});
      starts.push_back(hs.back().normalize(rts.back().instantiate(cname)));
    }
    for (std::size_t i = 0; i < variants.size(); ++i)
      for (std::size_t j = i + 1; j < variants.size(); ++j) {
        Bisimulation b(hs[i], hs[j]);
        NiPair pr{i, j, cname, b.check(starts[i], starts[j], opt.bound)};
        if (pr.result.verdict == Verdict::inconclusive) {
          std::string side = pr.result.divergent_side == 1 ? variants[i].name : variants[j].name;
          rep.inconclusive.push_back(variants[i].name + " vs " + variants[j].name + " in " + cname +
                                     ": divergence suspected in " + side + " (" + pr.result.counterexample + ")");
        }
        rep.pairs.push_back(std::move(pr));
      }
  }
  return rep;
}

}  // namespace sill
