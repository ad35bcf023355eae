#pragma once

#include "wmkubo/perturbation.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace wmkubo {

// Errors below this are treated as roundoff and excluded from slope fits.
inline constexpr double kSlopeNoiseFloor = 1e-13;
// A fitted slope is reported only when the RMS log residual is below this.
inline constexpr double kSlopeResidualLimit = 0.15;
// Smallest accepted max/min ratio of a sweep axis.
inline constexpr double kMinSweepSpan = 8.0;

// Ordinary least squares of log(err) against log(x).
struct SlopeFit {
  std::optional<double> slope;  // empty when undefined or residual too large
  double raw_slope = 0.0;
  double residual = 0.0;        // RMS residual in natural-log units
  std::size_t points = 0;
  std::string note;
};

SlopeFit fit_log_slope(std::span<const double> x, std::span<const double> err);

struct SweepRow {
  double lambda = 0.0;
  double exact = 0.0;
  double eq3 = 0.0;
  double modified_kubo = 0.0;
  double ordinary_kubo = 0.0;
  double err_eq3 = 0.0;
  double err_modified_kubo = 0.0;
  double err_ordinary_kubo = 0.0;
  double shift = 0.0;          // exact - <R(tau)>_0
  double amplification = 0.0;  // |shift| / (lambda * spectral radius of A)
  std::vector<std::string> flags;
};

struct SweepResult {
  std::string label;
  std::vector<SweepRow> rows;
  SlopeFit eq3;
  SlopeFit modified_kubo;
  SlopeFit ordinary_kubo;
};

// Runs every estimator against the exact engine at each lambda. Engine errors
// become row flags (values NaN). Requires >= 3 positive lambdas with
// max/min >= kMinSweepSpan.
SweepResult lambda_sweep(const Scenario& s, std::string_view f_label,
                         std::span<const double> lambdas);

struct NegativityHit {
  std::uint64_t seed = 0;      // random_seeded seed reproducing the finding
  double lambda = 0.0;
  std::size_t trial = 0;
  double min_taylor_joint = 0.0;
  double min_taylor_conditional = 0.0;
  double min_rational = 0.0;
};

struct NegativitySearch {
  std::optional<NegativityHit> hit;
  std::size_t trials_run = 0;
  double min_rational_seen = 0.0;  // over every trial evaluated
};

inline constexpr double kTaylorNegativityThreshold = -1e-3;

// Trial t draws random_seeded(seed + t) at each coupling in `lambdas` and stops
// at the first naive-Taylor entry below kTaylorNegativityThreshold whose
// rational form stays >= -1e-12.
std::span<const double> default_search_lambdas();
NegativitySearch negativity_search(std::uint64_t seed, std::size_t trials,
                                   std::span<const double> lambdas = default_search_lambdas());

struct CampaignEntry {
  std::string scenario;  // "random_seeded:<seed>" or the injected scenario name
  bool passed = true;
  std::vector<std::string> failures;
};

struct CampaignReport {
  std::vector<CampaignEntry> entries;
  std::size_t failures() const;
};

// Runs the invariant suite on random_seeded(seed + i), i < n_scenarios, then on
// `extra` scenarios when given. An invalid scenario yields a single failure.
CampaignReport property_campaign(std::uint64_t seed, std::size_t n_scenarios,
                                 std::span<const Scenario> extra = {});

// Invariant checks for one scenario; empty means all passed.
std::vector<std::string> scenario_invariant_failures(const Scenario& s);

// Output helpers.
std::string format_double(double v);  // 17 significant digits
void write_sweep_csv(std::ostream& out, const SweepResult& r);
std::string sweep_to_json(const SweepResult& r);
void write_campaign_csv(std::ostream& out, const CampaignReport& r);
std::string campaign_to_json(const CampaignReport& r);

}  // namespace wmkubo
