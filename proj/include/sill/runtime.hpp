#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sill/ast.hpp"

namespace sill {

class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Chan {
  std::uint32_t base = 0;
  std::uint32_t gen = 0;
  auto operator<=>(const Chan&) const = default;
};

// Interns channel base names. Fresh names are keyed structurally so that two
// runs of related programs allocate the same name for the same spawn.
class ChannelTable {
 public:
  std::uint32_t intern(const std::string& key, const std::string& display, SecLevel maxsec);
  std::optional<std::uint32_t> find(const std::string& key) const;
  const std::string& name(std::uint32_t base) const { return names_.at(base); }
  SecLevel maxsec(std::uint32_t base) const { return secs_.at(base); }
  SecLevel maxsec(Chan c) const { return secs_.at(c.base); }
  std::string display(Chan c) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> names_;
  std::vector<SecLevel> secs_;
};

enum class MsgKind : std::uint8_t { close, label_pos, label_neg, send_pos, send_neg };

const char* msg_kind_name(MsgKind k);
bool msg_positive(MsgKind k);

struct Node {
  enum class Kind : std::uint8_t { proc, msg };
  Kind kind = Kind::proc;
  Part part = Part::program;
  // Birth stamp; not part of node identity.
  std::uint64_t uid = 0;

  // proc
  Chan offer;
  std::string offer_var;
  TypeRef offer_type;
  SecLevel run;
  TermRef term;
  std::vector<std::pair<std::string, Chan>> env;
  std::vector<std::pair<std::string, SecLevel>> gamma;

  // msg: carrier is the channel the message travels on; cont is the next
  // generation (provided for negative messages, used for positive ones).
  MsgKind mkind = MsgKind::close;
  Chan carrier;
  Chan cont;
  Chan payload;
  std::string label;
  TypeRef msg_type;

  bool is_proc() const { return kind == Kind::proc; }
  bool is_msg() const { return kind == Kind::msg; }
  Chan provides() const;
  std::vector<Chan> uses() const;
  std::optional<Chan> lookup(const std::string& var) const;
  std::uint64_t content_hash() const;
};

bool node_equal(const Node& a, const Node& b);

struct InterfaceChan {
  Chan chan;
  TypeRef type;
  // Hidden top-level channels let a root forward step internally.
  bool observable = true;
};

struct Configuration {
  std::vector<Node> nodes;
  std::vector<InterfaceChan> uses;
  std::vector<InterfaceChan> provides;
  std::uint64_t next_uid = 1;

  // Order-insensitive; ignores birth stamps.
  std::uint64_t hash() const;
  bool empty() const { return nodes.empty(); }
};

bool config_equal(const Configuration& a, const Configuration& b);

enum class Rule : std::uint8_t {
  fwd,
  spawn,
  one_snd,
  one_rcv,
  plus_snd,
  plus_rcv,
  with_snd,
  with_rcv,
  tensor_snd,
  tensor_rcv,
  lolli_snd,
  lolli_rcv
};

const char* rule_name(Rule r);

struct Redex {
  Rule rule = Rule::fwd;
  // Index of the acting process; for receives also the message.
  std::size_t proc = 0;
  std::optional<std::size_t> msg;
  std::uint64_t age = 0;
};

struct Renaming {
  Chan from;
  Chan to;
};

struct StepInfo {
  Rule rule = Rule::fwd;
  Chan channel;
  SecLevel run_before;
  SecLevel run_after;
  std::vector<std::uint64_t> pre;
  std::vector<std::uint64_t> post;
  std::vector<Node> pre_nodes;
  std::optional<Renaming> renaming;
};

struct FocusSets {
  std::vector<Chan> incoming;
  std::vector<Chan> outgoing;
};

// Shared, immutable program plus the mutable channel namespace of its runs.
class Runtime {
 public:
  Runtime(std::shared_ptr<const Program> prog, std::shared_ptr<ChannelTable> chans);

  const Program& program() const { return *prog_; }
  const Signature& sig() const { return prog_->sig; }
  const SecurityLattice& lattice() const { return *prog_->sig.lattice; }
  ChannelTable& chans() const { return *chans_; }
  std::shared_ptr<ChannelTable> chans_ptr() const { return chans_; }

  // Instantiates a declared configuration.
  Configuration instantiate(const ConfigDecl& decl) const;
  Configuration instantiate(const std::string& name) const;

  std::vector<Redex> enabled(const Configuration& c) const;
  Configuration apply(const Configuration& c, const Redex& r, StepInfo* info = nullptr) const;

  FocusSets ready_sets(const Configuration& c) const;
  bool is_poised(const Configuration& c) const;

  // Index of the node providing / using a channel.
  std::optional<std::size_t> provider(const Configuration& c, Chan ch) const;
  std::optional<std::size_t> client(const Configuration& c, Chan ch) const;

  std::string show(const Configuration& c) const;
  std::string show(const Node& n) const;

 private:
  Chan fresh(const Node& parent, const Term& spawn, SecLevel maxsec) const;

  std::shared_ptr<const Program> prog_;
  std::shared_ptr<ChannelTable> chans_;
};

enum class Schedule : std::uint8_t { fifo, random, exhaustive };

struct TraceEntry {
  std::size_t step = 0;
  StepInfo info;
  std::uint64_t hash = 0;
};

struct RunResult {
  std::vector<TraceEntry> trace;
  Configuration final;
  bool poised = false;
  bool budget_exhausted = false;
  // exhaustive mode
  std::size_t states = 0;
  std::size_t depth_reached = 0;
};

struct RunOptions {
  Schedule schedule = Schedule::fifo;
  std::uint64_t seed = 0;
  std::size_t steps = 1000;
  // Called with the configuration reached after each step.
  std::function<void(const Configuration&, const TraceEntry&)> on_step;
};

RunResult run(const Runtime& rt, const Configuration& c, const RunOptions& opt);

// Breadth-first reachability with hash-deduplicated layers.
struct Exploration {
  std::vector<std::vector<Configuration>> layers;
  std::size_t states = 0;
  bool complete = false;
};
Exploration explore(const Runtime& rt, const Configuration& c, std::size_t depth, std::size_t max_states = 0);

}  // namespace sill
