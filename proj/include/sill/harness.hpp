#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sill/runtime.hpp"

namespace sill {

// A split is a closed configuration whose nodes are tagged below (C),
// program (D) or above (F).

struct ObsAction {
  enum class Dir : std::uint8_t { out, in };
  enum class Kind : std::uint8_t { message, forward };
  Dir dir = Dir::out;
  Kind kind = Kind::message;
  Chan channel;
  MsgKind mkind = MsgKind::close;
  std::string label;
  Chan cont;
  Chan payload;
  // forward: the channel substituted for `channel`
  Chan target;

  // Two labels compete when they travel the same way on the same channel.
  bool same_slot(const ObsAction& o) const { return dir == o.dir && channel == o.channel; }
  bool operator==(const ObsAction& o) const;
  std::string show(const ChannelTable& chans) const;
};

struct HarnessOptions {
  SecLevel xi;
  std::size_t depth = 64;
  std::size_t max_states = 20000;
};

class Harness {
 public:
  Harness(const Runtime& rt, HarnessOptions opt) : rt_(rt), opt_(opt) {}

  const Runtime& runtime() const { return rt_; }
  const HarnessOptions& options() const { return opt_; }

  // Hides unobservable top channels and pulls context trees attached to the
  // program through unobservable channels into the program.
  Configuration normalize(Configuration s) const;

  // Observable boundary crossings available right now.
  std::vector<std::pair<ObsAction, std::size_t>> ready(const Configuration& s) const;

  // Splits after crossing; tensor hand-overs yield two (plain, primed).
  std::vector<Configuration> cross(const Configuration& s, const ObsAction& a, std::size_t node) const;

  // Boundary channels of the program visible at xi, tagged by direction.
  std::vector<std::pair<Chan, bool>> observable_interface(const Configuration& s) const;

 private:
  const Runtime& rt_;
  HarnessOptions opt_;
};

// The program nodes alone; channels shared with the context become interface.
Configuration program_part(const Configuration& s);

// Breadth-first internal exploration with parent links.
struct Explored {
  std::vector<Configuration> states;
  std::vector<std::size_t> parent;
  std::vector<StepInfo> via;
  std::vector<std::size_t> depth;
  bool complete = false;

  std::vector<StepInfo> path_to(std::size_t i) const;
};
Explored explore_tree(const Runtime& rt, const Configuration& c, std::size_t depth, std::size_t max_states);

// Messages (or root forwards) in c carried on a channel of upsilon.
std::vector<std::uint64_t> sending_nodes(const Configuration& c, const std::vector<Chan>& upsilon);

// Backward slice of the witness from the upsilon messages, replayed forward
// from d. Throws RuntimeError when the witness does not send along upsilon.
Configuration minimal_sending(const Runtime& rt, const Configuration& d, const std::vector<Chan>& upsilon,
                              const std::vector<StepInfo>& witness);

// Replays a recorded step on a configuration by matching rule and pre-nodes.
std::optional<Configuration> replay_step(const Runtime& rt, const Configuration& c, const StepInfo& s,
                                         StepInfo* info = nullptr);

// Among all states reachable from d that send along upsilon, the unique one
// from which all others are reachable; nullopt if absent or over budget.
std::optional<Configuration> minimal_sending_oracle(const Runtime& rt, const Configuration& d,
                                                    const std::vector<Chan>& upsilon, std::size_t max_states);

enum class Verdict : std::uint8_t { equivalent, distinguished, inconclusive };
const char* verdict_name(Verdict v);

struct BisimResult {
  Verdict verdict = Verdict::equivalent;
  std::size_t bound = 0;
  // Observations leading to the distinguishing or undecided point.
  std::vector<std::string> trace;
  std::string counterexample;
  // 1 or 2 when one side's exploration could not settle (possible divergence).
  int divergent_side = 0;
};

class Bisimulation {
 public:
  Bisimulation(const Harness& h1, const Harness& h2) : h1_(h1), h2_(h2) {}
  BisimResult check(const Configuration& s1, const Configuration& s2, std::size_t m);
  std::size_t explorations() const { return explorations_; }

 private:
  struct Ready {
    std::vector<ObsAction> labels;
    std::vector<std::size_t> state;
    std::vector<std::size_t> node;
    Explored ex;
  };
  Ready weak(const Harness& h, const Configuration& s);
  std::vector<Configuration> post(const Harness& h, const Configuration& s, const Ready& r, std::size_t k);

  const Harness& h1_;
  const Harness& h2_;
  std::map<std::tuple<std::uint64_t, std::uint64_t, std::size_t>, BisimResult> memo_;
  std::size_t explorations_ = 0;
};

}  // namespace sill
