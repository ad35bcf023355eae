#pragma once

#include "wmkubo/model.hpp"

#include <stdexcept>
#include <string_view>

namespace wmkubo {

// P(f) fell below the configured floor; the postselection is (nearly)
// orthogonal to the evolved state.
class PostselectionFloorError : public std::runtime_error {
 public:
  PostselectionFloorError(const std::string& what, double value, double floor)
      : std::runtime_error(what), value_(value), floor_(floor) {}
  double value() const { return value_; }
  double floor() const { return floor_; }

 private:
  double value_;
  double floor_;
};

// Joint outcome probabilities, rows = detector outcomes k, columns = system
// outcomes j, measure weights included.
struct JointDistribution {
  RealMatrix p;
  // Entries in [-1e-12, 0) set to zero during construction.
  int clamped = 0;
  // Most negative raw entry seen before clamping.
  double min_raw = 0.0;

  double total() const { return p.sum(); }
  double system_marginal(Eigen::Index j) const { return p.col(j).sum(); }
  RealVector detector_marginal() const { return p.rowwise().sum(); }
  // P(R_k | f_j); throws PostselectionFloorError when P(f_j) <= floor.
  RealVector conditional(Eigen::Index j, double floor = Tolerances::denominator_floor) const;
};

// Time-ordered composite propagator on the midpoint grid:
// U = prod_k exp(-i H(t_k) dt), later times on the left, with
// H(t) = H_S x I + I x H_D - lambda g(t) A x X.
Operator full_propagator(const Scenario& s);

// U (rho_i x rho_0) U^dagger.
Operator evolved_state(const Scenario& s);

JointDistribution exact_joint(const Scenario& s);

// Joint distribution of an arbitrary composite state under the scenario's
// POVMs (weights included).
JointDistribution joint_from_state(const Scenario& s, const Operator& composite_state);

// sum_k value_k P(R_k | f).
double exact_conditional_average(const Scenario& s, std::string_view f_label,
                                 double floor = Tolerances::denominator_floor);

// Values of the detector outcomes, in POVM order.
RealVector detector_values(const Povm& det_povm);

}  // namespace wmkubo
