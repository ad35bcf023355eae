#include "wmkubo/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

namespace wmkubo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double spectral_radius(const Operator& a) {
  Eigen::SelfAdjointEigenSolver<Operator> solver((a + a.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

SweepRow sweep_row(const Scenario& base, std::string_view f_label, double lambda, double r0,
                   double radius) {
  SweepRow row;
  row.lambda = lambda;
  const Scenario s = base.with_lambda(lambda);
  row.exact = row.eq3 = row.modified_kubo = row.ordinary_kubo = kNaN;
  try {
    row.exact = exact_conditional_average(s, f_label);
  } catch (const PostselectionFloorError& e) {
    row.flags.push_back(std::string("exact: ") + e.what());
  }
  try {
    const MainFormulaResult main = conditional_average_main(s, f_label);
    row.eq3 = main.value;
    if (main.nonperturbative) row.flags.push_back("eq3: nonperturbative");
  } catch (const PostselectionFloorError& e) {
    row.flags.push_back(std::string("eq3: ") + e.what());
  } catch (const RegimeBreakdownError& e) {
    row.flags.push_back(std::string("eq3: ") + e.what());
  }
  try {
    row.modified_kubo = modified_kubo(s, f_label);
  } catch (const PostselectionFloorError& e) {
    row.flags.push_back(std::string("modified_kubo: ") + e.what());
  }
  row.ordinary_kubo = ordinary_kubo(s);

  row.err_eq3 = std::abs(row.eq3 - row.exact);
  row.err_modified_kubo = std::abs(row.modified_kubo - row.exact);
  row.err_ordinary_kubo = std::abs(row.ordinary_kubo - row.exact);
  row.shift = row.exact - r0;
  row.amplification = std::abs(row.shift) / (lambda * radius);
  return row;
}

SlopeFit fit_column(const std::vector<SweepRow>& rows, double SweepRow::*column) {
  std::vector<double> x, e;
  for (const auto& r : rows) {
    x.push_back(r.lambda);
    e.push_back(r.*column);
  }
  return fit_log_slope(x, e);
}

}  // namespace

SlopeFit fit_log_slope(std::span<const double> x, std::span<const double> err) {
  SlopeFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < err.size(); ++i) {
    if (!std::isfinite(err[i]) || err[i] < kSlopeNoiseFloor || !(x[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(err[i]));
  }
  fit.points = lx.size();
  if (fit.points < 3) {
    fit.note = "undefined: fewer than 3 points above the noise floor";
    return fit;
  }
  const double n = static_cast<double>(fit.points);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) {
    fit.note = "undefined: degenerate axis";
    return fit;
  }
  fit.raw_slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (my + fit.raw_slope * (lx[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  if (fit.residual < kSlopeResidualLimit) {
    fit.slope = fit.raw_slope;
  } else {
    fit.note = "withheld: residual above limit";
  }
  return fit;
}

SweepResult lambda_sweep(const Scenario& s, std::string_view f_label,
                         std::span<const double> lambdas) {
  if (lambdas.size() < 3) throw std::invalid_argument("lambda_sweep: need at least 3 values");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("lambda_sweep: coupling strengths must be positive");
    }
  }
  const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
  if (*hi / *lo < kMinSweepSpan) {
    throw std::invalid_argument("lambda_sweep: axis must span a factor of at least 8");
  }
  s.sys_povm.index_of(f_label);
  require_valid(s);

  const InteractionPicture ip = interaction_picture(s);
  const double r0 = trace_product(ip.r_tau, ip.rho_0).real();
  const double radius = spectral_radius(s.a_obs);

  std::vector<std::future<SweepRow>> pending;
  for (double l : lambdas) {
    pending.push_back(std::async(std::launch::async, sweep_row, std::cref(s), f_label, l, r0, radius));
  }
  SweepResult out;
  out.label = std::string(f_label);
  for (auto& f : pending) out.rows.push_back(f.get());

  out.eq3 = fit_column(out.rows, &SweepRow::err_eq3);
  out.modified_kubo = fit_column(out.rows, &SweepRow::err_modified_kubo);
  out.ordinary_kubo = fit_column(out.rows, &SweepRow::err_ordinary_kubo);
  return out;
}

std::span<const double> default_search_lambdas() {
  static constexpr std::array<double, 3> values{0.5, 1.0, 2.0};
  return values;
}

NegativitySearch negativity_search(std::uint64_t seed, std::size_t trials,
                                   std::span<const double> lambdas) {
  if (trials < 1) throw std::invalid_argument("negativity_search: trials must be >= 1");
  if (lambdas.empty()) throw std::invalid_argument("negativity_search: no coupling strengths");
  NegativitySearch out;
  out.min_rational_seen = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t scenario_seed = seed + t;
    ++out.trials_run;
    for (double lambda : lambdas) {
      const Scenario s = preset("random_seeded", {{"seed", static_cast<double>(scenario_seed)},
                                                  {"lambda", lambda}});
      const PerturbativeDistribution rational = perturbative_joint(s);
      const double min_rational = rational.probability().minCoeff();
      out.min_rational_seen = std::min(out.min_rational_seen, min_rational);
      const TaylorDistribution taylor = naive_taylor_probability(s);
      const double worst = std::min(taylor.min_joint, taylor.min_conditional);
      if (worst < kTaylorNegativityThreshold && min_rational >= -Tolerances::algebraic) {
        out.hit = NegativityHit{scenario_seed, lambda, t, taylor.min_joint,
                                taylor.min_conditional, min_rational};
        return out;
      }
    }
  }
  return out;
}

std::size_t CampaignReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return !e.passed; }));
}

std::vector<std::string> scenario_invariant_failures(const Scenario& s) {
  std::vector<std::string> fails;
  const auto report = validate_scenario(s);
  if (!report.ok()) {
    fails.push_back("validate_scenario: " + report.findings.front());
    return fails;
  }
  const auto check = [&](bool ok, const std::string& what, double measured) {
    if (!ok) fails.push_back(what + " (measured " + format_double(measured) + ")");
  };

  const Operator u = full_propagator(s);
  const double unitarity = max_abs(u.adjoint() * u - identity(u.rows()));
  check(unitarity < 1e-9, "full_propagator unitarity", unitarity);

  const JointDistribution exact = exact_joint(s);
  check(std::abs(exact.total() - 1.0) < Tolerances::structural, "exact_joint total", exact.total());

  for (double lambda : {s.lambda(), 1.0, 2.0}) {
    const double lo = perturbative_joint(s.with_lambda(lambda)).probability().minCoeff();
    check(lo >= -Tolerances::algebraic, "perturbative positivity", lo);
  }

  const PerturbativeDistribution pert = perturbative_joint(s);
  try {
    const PerturbativeDistribution wv = perturbative_joint_weakvalue_form(s);
    const double dev = max_abs(pert.q - wv.q);
    check(dev < Tolerances::structural, "factorization identity", dev);
  } catch (const PostselectionFloorError&) {
    // Orthogonal postselection for some outcome; identity not defined.
  }

  const InteractionPicture ip = interaction_picture(s);
  const RealVector values = detector_values(s.det_povm);
  for (std::size_t j = 0; j < s.sys_povm.size(); ++j) {
    const auto& outcome = s.sys_povm.outcomes[j];
    try {
      const WeakValueTrace wv = weak_value_trace(ip, outcome, static_cast<Eigen::Index>(j));
      const double asym = max_abs(wv.b_w.adjoint() - wv.b_w);
      check(asym < Tolerances::structural, "B_w conjugate symmetry", asym);
      const double moment = values.dot(pert.conditional(static_cast<Eigen::Index>(j)));
      const double main = conditional_average_main(s, outcome.label).value;
      check(std::abs(main - moment) < 1e-9, "moment identity", std::abs(main - moment));
    } catch (const PostselectionFloorError&) {
    } catch (const RegimeBreakdownError&) {
    }
  }

  const Scenario trivial = s.with_trivial_postselection();
  const WeakValueTrace wv = weak_value_trace(trivial, trivial.sys_povm.outcomes[0].label);
  double max_imag = 0.0;
  for (const Complex& a : wv.a_w) max_imag = std::max(max_imag, std::abs(a.imag()));
  check(max_imag < Tolerances::algebraic, "no-postselection Im A_w", max_imag);
  const double kubo_gap = std::abs(modified_kubo(trivial, trivial.sys_povm.outcomes[0].label) -
                                   ordinary_kubo(trivial));
  check(kubo_gap < Tolerances::algebraic, "no-postselection Kubo recovery", kubo_gap);
  return fails;
}

CampaignReport property_campaign(std::uint64_t seed, std::size_t n_scenarios,
                                 std::span<const Scenario> extra) {
  if (n_scenarios < 1) throw std::invalid_argument("property_campaign: n_scenarios must be >= 1");
  CampaignReport report;
  const auto record = [&](std::string name, const Scenario& s) {
    CampaignEntry entry;
    entry.scenario = std::move(name);
    entry.failures = scenario_invariant_failures(s);
    entry.passed = entry.failures.empty();
    report.entries.push_back(std::move(entry));
  };
  for (std::size_t i = 0; i < n_scenarios; ++i) {
    const std::uint64_t sd = seed + i;
    record("random_seeded:" + std::to_string(sd),
           preset("random_seeded", {{"seed", static_cast<double>(sd)}}));
  }
  for (const auto& s : extra) record(s.name, s);
  return report;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) out += (out.empty() ? "" : "; ") + f;
  return out;
}

nlohmann::json fit_json(const SlopeFit& f) {
  nlohmann::json j{{"raw_slope", f.raw_slope}, {"residual", f.residual}, {"points", f.points}};
  j["slope"] = f.slope ? nlohmann::json(*f.slope) : nlohmann::json(nullptr);
  if (!f.note.empty()) j["note"] = f.note;
  return j;
}

nlohmann::json number_json(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "lambda,exact,eq3,modified_kubo,ordinary_kubo,err_eq3,err_modified_kubo,"
         "err_ordinary_kubo,shift,amplification,flags\r\n";
  for (const auto& row : r.rows) {
    out << format_double(row.lambda) << ',' << format_double(row.exact) << ','
        << format_double(row.eq3) << ',' << format_double(row.modified_kubo) << ','
        << format_double(row.ordinary_kubo) << ',' << format_double(row.err_eq3) << ','
        << format_double(row.err_modified_kubo) << ',' << format_double(row.err_ordinary_kubo)
        << ',' << format_double(row.shift) << ',' << format_double(row.amplification) << ','
        << csv_field(join_flags(row.flags)) << "\r\n";
  }
}

std::string sweep_to_json(const SweepResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"lambda", row.lambda},
                    {"exact", number_json(row.exact)},
                    {"eq3", number_json(row.eq3)},
                    {"modified_kubo", number_json(row.modified_kubo)},
                    {"ordinary_kubo", number_json(row.ordinary_kubo)},
                    {"err_eq3", number_json(row.err_eq3)},
                    {"err_modified_kubo", number_json(row.err_modified_kubo)},
                    {"err_ordinary_kubo", number_json(row.err_ordinary_kubo)},
                    {"shift", number_json(row.shift)},
                    {"amplification", number_json(row.amplification)},
                    {"flags", row.flags}});
  }
  nlohmann::json doc{{"label", r.label},
                     {"rows", rows},
                     {"slopes",
                      {{"eq3", fit_json(r.eq3)},
                       {"modified_kubo", fit_json(r.modified_kubo)},
                       {"ordinary_kubo", fit_json(r.ordinary_kubo)}}}};
  return doc.dump(2);
}

void write_campaign_csv(std::ostream& out, const CampaignReport& r) {
  out << "scenario,passed,failures\r\n";
  for (const auto& e : r.entries) {
    out << csv_field(e.scenario) << ',' << (e.passed ? "true" : "false") << ','
        << csv_field(join_flags(e.failures)) << "\r\n";
  }
}

std::string campaign_to_json(const CampaignReport& r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"scenario", e.scenario}, {"passed", e.passed}, {"failures", e.failures}});
  }
  return nlohmann::json{{"failures", r.failures()}, {"entries", entries}}.dump(2);
}

}  // namespace wmkubo
