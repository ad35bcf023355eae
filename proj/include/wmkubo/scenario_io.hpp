#pragma once

#include "wmkubo/model.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wmkubo {

inline constexpr std::string_view kScenarioSchema = "wmkubo.scenario/1";

// Malformed or non-conforming scenario document.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parses a scenario document (full scenario or preset reference). Unknown keys
// are rejected. The result is not validated; see validate_scenario().
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

// Full-scenario document; doubles are written with round-trip precision.
std::string emit_scenario(const Scenario& s, int indent = 2);

// FNV-1a over the compact emitted document.
std::uint64_t scenario_hash(const Scenario& s);
std::string scenario_hash_hex(const Scenario& s);

}  // namespace wmkubo
