#pragma once

#include "wmkubo/linalg.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wmkubo {

class InvalidScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownPresetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Positive semidefinite, unit-trace operator. Holding one does not imply the
// invariants hold; density_findings() reports violations.
struct DensityState {
  Operator op;

  static DensityState pure(const Eigen::Ref<const Eigen::VectorXcd>& psi);
  static DensityState maximally_mixed(Eigen::Index dim);
  Eigen::Index dim() const { return op.rows(); }
};

std::vector<std::string> density_findings(const DensityState& rho, std::string_view name,
                                          double tol = Tolerances::structural);

struct PovmOutcome {
  std::string label;
  double value = 0.0;    // readout value attached to the outcome
  Operator effect;       // PSD, not necessarily a projector
  double weight = 1.0;   // measure weight
};

// Discrete POVM: sum_k weight_k * effect_k = I.
struct Povm {
  std::vector<PovmOutcome> outcomes;

  std::size_t size() const { return outcomes.size(); }
  // Index of the outcome with this label; throws std::out_of_range.
  std::size_t index_of(std::string_view label) const;
  const PovmOutcome& at(std::string_view label) const { return outcomes[index_of(label)]; }

  static Povm trivial(Eigen::Index dim, std::string label = "1");
  // Projective POVM from orthonormal columns of `basis`, weights 1.
  static Povm projective(const Eigen::Ref<const Operator>& basis,
                         const std::vector<double>& values,
                         const std::vector<std::string>& labels);
};

std::vector<std::string> povm_findings(const Povm& povm, Eigen::Index dim, std::string_view name,
                                       double completeness_tol = Tolerances::completeness);

// R = sum_k weight_k * value_k * effect_k. Throws InvalidScenarioError if the
// POVM has findings.
Operator pointer_operator(const Povm& povm, double completeness_tol = Tolerances::completeness);

// effect / Tr(effect). Throws std::domain_error for Tr(effect) <= 1e-12.
DensityState retrodiction_state(const PovmOutcome& outcome);

// Coupling profile g(t) on [0, tau], sampled at n_t uniform midpoints
// t_k = (k + 1/2) tau / n_t, with sum_k g_k dt = 1.
struct CouplingProfile {
  enum class Shape { samples, boxcar, delta, sin2 };

  double tau = 1.0;
  double lambda = 0.0;
  std::vector<double> samples;
  // Analytic descriptor used to resample on a different grid. `begin`/`end`
  // are absolute times inside [0, tau]; ignored for samples and delta.
  Shape shape = Shape::samples;
  double begin = 0.0;
  double end = 0.0;

  std::size_t size() const { return samples.size(); }
  double dt() const { return tau / static_cast<double>(samples.size()); }
  double time(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dt(); }
  double integral() const;

  // Same shape on an n_t-point grid; throws std::logic_error for Shape::samples.
  CouplingProfile resampled(std::size_t n_t) const;

  static CouplingProfile boxcar(double tau, std::size_t n_t, double lambda, double begin,
                                double end);
  // All weight in the first grid cell: g = 1/dt on [0, dt).
  static CouplingProfile delta(double tau, std::size_t n_t, double lambda);
  static CouplingProfile sin2(double tau, std::size_t n_t, double lambda, double begin,
                              double end);
  static CouplingProfile from_samples(double tau, double lambda, std::vector<double> samples);
};

std::string_view to_string(CouplingProfile::Shape shape);
CouplingProfile::Shape shape_from_string(std::string_view name);

struct Scenario {
  std::string name;
  Eigen::Index dim_s = 0;
  Eigen::Index dim_d = 0;
  Operator h_s;
  Operator h_d;
  Operator a_obs;  // system observable coupled to the detector
  Operator x_obs;  // detector operator it couples through
  DensityState rho_i;
  DensityState rho_0;
  Povm sys_povm;
  Povm det_povm;
  CouplingProfile coupling;
  // Completeness tolerance; truncated-oscillator presets relax it.
  double completeness_tol = Tolerances::completeness;
  std::map<std::string, std::string> metadata;

  std::size_t n_t() const { return coupling.size(); }
  double lambda() const { return coupling.lambda; }

  Scenario with_lambda(double lambda) const;
  Scenario with_resolution(std::size_t n_t) const;
  Scenario with_trivial_postselection() const;
};

struct ValidationReport {
  std::vector<std::string> findings;
  bool ok() const { return findings.empty(); }
};

ValidationReport validate_scenario(const Scenario& s);

// Throws InvalidScenarioError listing every finding.
void require_valid(const Scenario& s);

// Preset parameters are name -> number; unknown names are rejected.
using PresetParams = std::map<std::string, double>;

// aav_gaussian, qubit_qubit, random_seeded, taylor_negativity.
Scenario preset(std::string_view name, const PresetParams& params = {});
std::vector<std::string> preset_names();

// Pinned outcome of negativity_search(search_seed, ...): the first hit is
// random_seeded at `seed` with coupling `lambda`. taylor_negativity replays it.
struct PinnedNegativity {
  static constexpr std::uint64_t search_seed = 1000;
  static constexpr std::uint64_t seed = 1012;
  static constexpr double lambda = 2.0;
};

}  // namespace wmkubo
