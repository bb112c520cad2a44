#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sill/harness.hpp"

namespace sill {

// Source text that replaces the context lines of `config` with generated
// providers and clients, as a new configuration named `name`. Every variant
// sharing the boundary gets the same text. Throws RuntimeError for boundary
// types the generator cannot serve.
std::string random_context(const Program& p, const std::string& config, const std::string& name,
                           std::mt19937_64& rng, int budget = 3);

// Program extended with extra declarations given as source text.
Program extend_program(const Program& p, const std::string& extra);

struct NiVariant {
  std::string name;
  std::shared_ptr<const Program> program;
};

struct NiOptions {
  SecLevel xi;
  std::size_t bound = 4;
  std::size_t depth = 64;
  std::size_t max_states = 20000;
  bool random_contexts = false;
  std::uint64_t seed = 0;
  std::size_t samples = 3;
  // Skip the signature check (for deliberately untyped variants).
  bool unchecked = false;
};

struct NiPair {
  std::size_t first = 0;
  std::size_t second = 0;
  std::string context;
  BisimResult result;
};

struct NiReport {
  std::vector<NiPair> pairs;
  // One line per undecided pair.
  std::vector<std::string> inconclusive;
};

// Checks every unordered pair of variants in every context.
NiReport check_noninterference(const std::vector<NiVariant>& variants, const std::string& config,
                               const NiOptions& opt);

}  // namespace sill
