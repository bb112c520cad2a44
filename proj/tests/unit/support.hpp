#pragma once

#include <memory>
#include <string>

#include "sill/parser.hpp"

inline std::string example_path(const std::string& name) { return std::string(SILL_EXAMPLES) + "/" + name; }

inline std::shared_ptr<const sill::Program> load_example(const std::string& name) {
  return std::make_shared<const sill::Program>(sill::load_program(example_path(name)));
}

inline std::shared_ptr<const sill::Program> parse(std::string_view src) {
  return std::make_shared<const sill::Program>(sill::parse_program(src));
}

inline constexpr const char* kHeader = R"(
level guest, alice, bob, bank;
order guest <= alice <= bank;
order guest <= bob <= bank;
)";
