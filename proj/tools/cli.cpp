#include "cli.hpp"

#include "wmkubo/harness.hpp"
#include "wmkubo/scenario_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace wmkubo::cli {

using nlohmann::json;

namespace {

// Output document: a CSV table preceded by one provenance comment line, or a
// JSON object carrying the same provenance.
struct Emission {
  std::string command;
  std::string scenario_id;
  std::size_t n_t = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json result;
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Emission& e, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    json doc{{"tool", "wmkubo"},
             {"version", kVersion},
             {"command", e.command},
             {"scenario", e.scenario_id},
             {"n_t", e.n_t},
             {"result", e.result}};
    os << doc.dump(2) << '\n';
    return os.str();
  }
  os << "# wmkubo " << kVersion << " command=" << e.command << " scenario=" << e.scenario_id
     << " n_t=" << e.n_t << "\r\n";
  for (std::size_t c = 0; c < e.columns.size(); ++c) os << (c ? "," : "") << e.columns[c];
  os << "\r\n";
  for (const auto& row : e.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_escape(row[c]);
    os << "\r\n";
  }
  return os.str();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Scenario resolve_scenario(const RunConfig& c) {
  if (c.config_path.has_value() == c.preset_name.has_value()) {
    throw ConfigError("exactly one scenario source is required: --config FILE or --preset NAME");
  }
  if (c.preset_name) {
    PresetParams p = c.params;
    if (c.lambda) p["lambda"] = *c.lambda;
    if (c.epsilon) p["epsilon"] = *c.epsilon;
    if (c.n_t) p["n_t"] = static_cast<double>(*c.n_t);
    if (c.seed) p["seed"] = static_cast<double>(*c.seed);
    try {
      return preset(*c.preset_name, p);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (!c.params.empty() || c.epsilon || c.seed) {
    throw ConfigError("--param, --epsilon and --seed apply to presets only");
  }
  Scenario s = load_scenario(*c.config_path);
  if (c.lambda) s = s.with_lambda(*c.lambda);
  if (c.n_t) {
    try {
      s = s.with_resolution(*c.n_t);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("--n-t: ") + e.what());
    }
  }
  return s;
}

std::string resolve_label(const RunConfig& c, const Scenario& s) {
  if (c.label) {
    s.sys_povm.index_of(*c.label);
    return *c.label;
  }
  return s.sys_povm.outcomes.front().label;
}

Emission scenario_emission(const std::string& command, const Scenario& s) {
  Emission e;
  e.command = command;
  e.scenario_id = scenario_hash_hex(s);
  e.n_t = s.n_t();
  return e;
}

int cmd_validate(const Scenario& s, Emission& e, std::ostream& diag) {
  const ValidationReport report = validate_scenario(s);
  e.columns = {"finding"};
  e.result = json{{"valid", report.ok()}, {"findings", report.findings}};
  for (const auto& f : report.findings) {
    e.rows.push_back({f});
    diag << "finding: " << f << '\n';
  }
  return report.ok() ? kOk : kInvalidScenario;
}

void cmd_exact(const Scenario& s, Emission& e, std::ostream& diag) {
  const JointDistribution joint = exact_joint(s);
  if (joint.clamped > 0) {
    diag << "note: " << joint.clamped << " roundoff-negative probabilities clamped to 0 (min "
         << format_double(joint.min_raw) << ")\n";
  }
  e.columns = {"sys_label", "det_label", "det_value", "probability"};
  json rows = json::array();
  for (std::size_t j = 0; j < s.sys_povm.size(); ++j) {
    for (std::size_t k = 0; k < s.det_povm.size(); ++k) {
      const auto& so = s.sys_povm.outcomes[j];
      const auto& dout = s.det_povm.outcomes[k];
      const double p = joint.p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
      e.rows.push_back({so.label, dout.label, format_double(dout.value), format_double(p)});
      rows.push_back({{"sys_label", so.label},
                      {"det_label", dout.label},
                      {"det_value", dout.value},
                      {"probability", p}});
    }
  }
  e.result = json{{"total", joint.total()}, {"clamped", joint.clamped}, {"joint", rows}};
}

void cmd_weakvalues(const RunConfig& c, const Scenario& s, Emission& e) {
  const std::string label = resolve_label(c, s);
  const WeakValueTrace wv = weak_value_trace(s, label, c.floor);
  e.columns = {"index", "time", "g", "a_w_re", "a_w_im"};
  json samples = json::array();
  for (std::size_t k = 0; k < s.n_t(); ++k) {
    const double t = s.coupling.time(k);
    const double g = s.coupling.samples[k];
    e.rows.push_back({std::to_string(k), format_double(t), format_double(g),
                      format_double(wv.a_w[k].real()), format_double(wv.a_w[k].imag())});
    samples.push_back({{"index", k}, {"time", t}, {"g", g}, {"a_w", {wv.a_w[k].real(), wv.a_w[k].imag()}}});
  }
  e.result = json{{"label", label}, {"denominator", wv.denom}, {"samples", samples}};
}

void cmd_eq3(const RunConfig& c, const Scenario& s, Emission& e, std::ostream& diag) {
  const std::string label = resolve_label(c, s);
  const auto j = static_cast<Eigen::Index>(s.sys_povm.index_of(label));
  const double exact = exact_conditional_average(s, label, c.floor);
  const double pf_exact = exact_joint(s).system_marginal(j);
  const MainFormulaResult main = conditional_average_main(s, label, c.floor);
  if (main.nonperturbative) {
    diag << "warning: second-order terms exceed " << kNonperturbativeThreshold
         << "; the expansion is outside its perturbative regime\n";
  }
  const double mk = modified_kubo(s, label, c.floor);
  const double ok = ordinary_kubo(s);
  const double pf = postselection_probability(s, label, c.floor);
  e.columns = {"label", "lambda", "exact", "eq3", "modified_kubo", "ordinary_kubo",
               "postselection_exact", "postselection_rational", "nonperturbative"};
  e.rows.push_back({label, format_double(s.lambda()), format_double(exact), format_double(main.value),
                    format_double(mk), format_double(ok), format_double(pf_exact), format_double(pf),
                    main.nonperturbative ? "true" : "false"});
  e.result = json{{"label", label},
                  {"lambda", s.lambda()},
                  {"exact", exact},
                  {"eq3", main.value},
                  {"modified_kubo", mk},
                  {"ordinary_kubo", ok},
                  {"postselection_exact", pf_exact},
                  {"postselection_rational", pf},
                  {"nonperturbative", main.nonperturbative}};
}

void cmd_kubo(const RunConfig& c, const Scenario& s, Emission& e) {
  const std::string label = resolve_label(c, s);
  const double mk = modified_kubo(s, label, c.floor);
  const double ok = ordinary_kubo(s);
  e.columns = {"label", "lambda", "modified_kubo", "ordinary_kubo"};
  e.rows.push_back({label, format_double(s.lambda()), format_double(mk), format_double(ok)});
  e.result = json{{"label", label}, {"lambda", s.lambda()}, {"modified_kubo", mk}, {"ordinary_kubo", ok}};
}

void describe_fit(std::ostream& diag, const char* name, const SlopeFit& f) {
  diag << "slope " << name << ": ";
  if (f.slope) {
    diag << format_double(*f.slope) << " (residual " << format_double(f.residual) << ")\n";
  } else {
    diag << f.note << '\n';
  }
}

void cmd_sweep(const RunConfig& c, const Scenario& s, Emission& e, std::ostream& diag) {
  const std::string label = resolve_label(c, s);
  const SweepResult r = lambda_sweep(s, label, c.lambdas);
  e.columns = {"lambda", "exact", "eq3", "modified_kubo", "ordinary_kubo", "err_eq3",
               "err_modified_kubo", "err_ordinary_kubo", "shift", "amplification", "flags"};
  for (const auto& row : r.rows) {
    std::string flags;
    for (const auto& f : row.flags) flags += (flags.empty() ? "" : "; ") + f;
    e.rows.push_back({format_double(row.lambda), format_double(row.exact), format_double(row.eq3),
                      format_double(row.modified_kubo), format_double(row.ordinary_kubo),
                      format_double(row.err_eq3), format_double(row.err_modified_kubo),
                      format_double(row.err_ordinary_kubo), format_double(row.shift),
                      format_double(row.amplification), flags});
    for (const auto& f : row.flags) diag << "lambda " << format_double(row.lambda) << ": " << f << '\n';
  }
  describe_fit(diag, "eq3", r.eq3);
  describe_fit(diag, "modified_kubo", r.modified_kubo);
  describe_fit(diag, "ordinary_kubo", r.ordinary_kubo);
  e.result = json::parse(sweep_to_json(r));
}

void cmd_search(const RunConfig& c, Emission& e, std::ostream& diag) {
  const std::uint64_t seed = c.seed.value_or(PinnedNegativity::search_seed);
  const NegativitySearch r = negativity_search(seed, c.trials);
  e.command = "search-negativity";
  e.columns = {"found", "seed", "lambda", "trial", "min_taylor_joint", "min_taylor_conditional",
               "min_rational"};
  if (r.hit) {
    const Scenario hit = preset("random_seeded", {{"seed", static_cast<double>(r.hit->seed)},
                                                  {"lambda", r.hit->lambda}});
    e.scenario_id = scenario_hash_hex(hit);
    e.n_t = hit.n_t();
    e.rows.push_back({"true", std::to_string(r.hit->seed), format_double(r.hit->lambda),
                      std::to_string(r.hit->trial), format_double(r.hit->min_taylor_joint),
                      format_double(r.hit->min_taylor_conditional),
                      format_double(r.hit->min_rational)});
    e.result = json{{"found", true},
                    {"seed", r.hit->seed},
                    {"lambda", r.hit->lambda},
                    {"trial", r.hit->trial},
                    {"min_taylor_joint", r.hit->min_taylor_joint},
                    {"min_taylor_conditional", r.hit->min_taylor_conditional},
                    {"min_rational", r.hit->min_rational}};
  } else {
    e.scenario_id = "none";
    e.rows.push_back({"false", "", "", std::to_string(r.trials_run), "", "",
                      format_double(r.min_rational_seen)});
    e.result = json{{"found", false}, {"trials", r.trials_run},
                    {"min_rational_seen", finite_or_null(r.min_rational_seen)}};
    diag << "no negativity found in " << r.trials_run << " trials\n";
  }
}

void cmd_campaign(const RunConfig& c, Emission& e, std::ostream& diag) {
  const std::uint64_t seed = c.seed.value_or(1);
  const CampaignReport r = property_campaign(seed, c.count);
  e.command = "campaign";
  e.scenario_id = "random_seeded:" + std::to_string(seed) + "+" + std::to_string(c.count);
  e.n_t = preset("random_seeded", {{"seed", static_cast<double>(seed)}}).n_t();
  e.columns = {"scenario", "passed", "failures"};
  for (const auto& entry : r.entries) {
    std::string fails;
    for (const auto& f : entry.failures) fails += (fails.empty() ? "" : "; ") + f;
    e.rows.push_back({entry.scenario, entry.passed ? "true" : "false", fails});
    if (!entry.passed) diag << "failure: " << entry.scenario << ": " << fails << '\n';
  }
  diag << r.failures() << " of " << r.entries.size() << " scenarios failed\n";
  e.result = json::parse(campaign_to_json(r));
}

int write_output(const RunConfig& c, const Emission& e, std::ostream& data, std::ostream& diag) {
  const std::string text = render(e, c.format);
  if (!c.output_path) {
    data << text;
    return kOk;
  }
  std::ofstream file(*c.output_path, std::ios::binary | std::ios::trunc);
  if (file) file << text;
  if (!file) {
    diag << "error: cannot write '" << *c.output_path << "'\n";
    return kIoFailure;
  }
  return kOk;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"validate", "exact", "weakvalues", "eq3",
                                              "kubo", "sweep", "search-negativity", "campaign"};
  return names;
}

std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& config,
                              std::ostream& out, std::ostream& diag) {
  CLI::App app{"Weak-measurement simulator: exact evolution, weak values, "
               "second-order conditional averages and Kubo-type response"};
  app.set_version_flag("--version", kVersion);

  std::vector<std::string> params;
  std::size_t n_t = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0, epsilon = 0.0;
  std::string config_path, preset_name, output_path, label;

  app.add_option("command", config.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(commands()));
  auto* opt_config = app.add_option("--config,-c", config_path, "Scenario document (JSON)");
  auto* opt_preset = app.add_option("--preset,-p", preset_name, "Preset scenario name")
                         ->check(CLI::IsMember(preset_names()));
  opt_config->excludes(opt_preset);
  app.add_option("--param", params, "Preset parameter override key=value (repeatable)");
  app.add_option("--format,-f", config.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  auto* opt_output = app.add_option("--output,-o", output_path, "Write data to this file");
  auto* opt_lambda = app.add_option("--lambda", lambda, "Coupling strength");
  auto* opt_epsilon = app.add_option("--epsilon", epsilon, "Pre/postselection overlap angle (aav_gaussian)");
  auto* opt_nt = app.add_option("--n-t", n_t, "Time-grid resolution")->check(CLI::PositiveNumber);
  auto* opt_seed = app.add_option("--seed", seed, "Random seed (random_seeded, searches, campaigns)");
  app.add_option("--floor", config.floor, "Postselection probability floor")->check(CLI::PositiveNumber);
  auto* opt_label = app.add_option("--label,-l", label, "Postselection outcome label");
  app.add_option("--lambdas", config.lambdas, "Sweep axis")->delimiter(',');
  app.add_option("--trials", config.trials, "Negativity-search trials")->check(CLI::PositiveNumber);
  app.add_option("--count", config.count, "Campaign scenario count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, diag);
    return code == 0 ? kOk : kBadConfig;
  }

  if (*opt_config) config.config_path = config_path;
  if (*opt_preset) config.preset_name = preset_name;
  if (*opt_output) config.output_path = output_path;
  if (*opt_lambda) config.lambda = lambda;
  if (*opt_epsilon) config.epsilon = epsilon;
  if (*opt_nt) config.n_t = n_t;
  if (*opt_seed) config.seed = seed;
  if (*opt_label) config.label = label;
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      diag << "error: --param expects key=value, got '" << kv << "'\n";
      return kBadConfig;
    }
    try {
      std::size_t used = 0;
      const std::string value = kv.substr(eq + 1);
      config.params[kv.substr(0, eq)] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      diag << "error: --param value is not a number in '" << kv << "'\n";
      return kBadConfig;
    }
  }
  return std::nullopt;
}

int run(const RunConfig& config, std::ostream& data, std::ostream& diag) {
  try {
    Emission e;
    int status = kOk;
    if (config.command == "search-negativity") {
      cmd_search(config, e, diag);
    } else if (config.command == "campaign") {
      cmd_campaign(config, e, diag);
    } else {
      const Scenario s = resolve_scenario(config);
      e = scenario_emission(config.command, s);
      if (config.command == "validate") {
        status = cmd_validate(s, e, diag);
      } else {
        const ValidationReport report = validate_scenario(s);
        if (!report.ok()) {
          for (const auto& f : report.findings) diag << "finding: " << f << '\n';
          return kInvalidScenario;
        }
        if (config.command == "exact") cmd_exact(s, e, diag);
        else if (config.command == "weakvalues") cmd_weakvalues(config, s, e);
        else if (config.command == "eq3") cmd_eq3(config, s, e, diag);
        else if (config.command == "kubo") cmd_kubo(config, s, e);
        else if (config.command == "sweep") cmd_sweep(config, s, e, diag);
        else throw ConfigError("unknown command '" + config.command + "'");
      }
    }
    const int io = write_output(config, e, data, diag);
    return io != kOk ? io : status;
  } catch (const InvalidScenarioError& e) {
    diag << "error: " << e.what() << '\n';
    return kInvalidScenario;
  } catch (const PostselectionFloorError& e) {
    diag << "error: " << e.what() << '\n';
    return kPostselectionFloor;
  } catch (const RegimeBreakdownError& e) {
    diag << "error: " << e.what() << '\n';
    return kPostselectionFloor;
  } catch (const std::ios_base::failure& e) {
    diag << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::invalid_argument& e) {
    diag << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::out_of_range& e) {
    diag << "error: " << e.what() << '\n';
    return kBadConfig;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& diag) {
  RunConfig config;
  if (const auto code = parse_args(argc, argv, config, out, diag)) return *code;
  return run(config, out, diag);
}

}  // namespace wmkubo::cli
