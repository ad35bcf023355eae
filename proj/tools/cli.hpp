#pragma once

#include "wmkubo/model.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wmkubo::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kBadConfig = 2,
  kInvalidScenario = 3,
  kPostselectionFloor = 4,
  kIoFailure = 5,
};

struct RunConfig {
  std::string command;  // validate | exact | weakvalues | eq3 | kubo | sweep | search-negativity | campaign
  std::optional<std::string> config_path;
  std::optional<std::string> preset_name;
  PresetParams params;  // --param key=value
  std::string format = "csv";  // csv | json
  std::optional<std::string> output_path;
  std::optional<double> lambda;
  std::optional<double> epsilon;
  std::optional<std::size_t> n_t;
  std::optional<std::uint64_t> seed;
  double floor = Tolerances::denominator_floor;
  std::optional<std::string> label;
  std::vector<double> lambdas{0.16, 0.08, 0.04, 0.02};
  std::size_t trials = 200;
  std::size_t count = 200;
};

const std::vector<std::string>& commands();

// Parses argv into a RunConfig. Returns the exit code to use immediately
// (help or parse failure) or nullopt to continue.
std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& config,
                              std::ostream& out, std::ostream& diag);

// Dispatches a parsed config. Data goes to `data` (or the output file);
// findings and warnings go to `diag`.
int run(const RunConfig& config, std::ostream& data, std::ostream& diag);

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& diag);

}  // namespace wmkubo::cli
