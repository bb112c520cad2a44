#pragma once

#include <map>
#include <string>
#include <vector>

#include "sill/runtime.hpp"

namespace sill {

// Keeps the interface channels an observer at xi can see.
std::vector<InterfaceChan> project_ctx(const std::vector<InterfaceChan>& delta, const ChannelTable& chans,
                                       const SecurityLattice& lat, SecLevel xi);

// Quasi running secrecy per node index.
std::vector<SecLevel> quasi_secrecy(const Runtime& rt, const Configuration& c);

struct ProjectedConfig {
  // Indices into the configuration's nodes, in node order.
  std::vector<std::size_t> nodes;
  std::vector<SecLevel> quasi;
  std::vector<Chan> channels;
};

// Channels touched by a node: provided first, then used.
std::vector<Chan> touched(const Node& n);

// Least fixpoint of relevance seeded by the observable interface channels.
// Only program nodes qualify. The interface is c.uses, c.provides and the
// program/context boundary unless given explicitly.
ProjectedConfig relevant_nodes(const Runtime& rt, const Configuration& c, SecLevel xi);
ProjectedConfig relevant_nodes(const Runtime& rt, const Configuration& c, SecLevel xi,
                               const std::vector<Chan>& interface);

// Equality of the projections up to a generation-coherent bijective renaming
// of channels the observer cannot see.
bool proj_eq(const Runtime& rt1, const Configuration& d1, const Runtime& rt2, const Configuration& d2, SecLevel xi);

// Projection listing for display.
std::string show_projection(const Runtime& rt, const Configuration& c, SecLevel xi);

}  // namespace sill
