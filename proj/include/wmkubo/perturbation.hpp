#pragma once

#include "wmkubo/exact.hpp"

#include <string_view>
#include <vector>

namespace wmkubo {

// The second-order denominator of the conditional-average formula is not
// positive; the perturbative expansion has broken down.
class RegimeBreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Free-evolution (interaction representation) data sampled on the coupling
// grid. Time-dependent operators are stored only at samples where g != 0;
// `active[m]` is the grid index of a_t[m] and x_t[m].
struct InteractionPicture {
  std::size_t n_t = 0;
  double dt = 0.0;
  double lambda = 0.0;
  std::vector<double> g;
  std::vector<std::size_t> active;
  std::vector<Operator> a_t;           // A(t_k) = U_S(t_k)^dagger A U_S(t_k)
  std::vector<Operator> x_t;           // X(t_k) = U_D(t_k)^dagger X U_D(t_k)
  std::vector<Operator> sys_effects;   // E_j(-tau) = U_S(tau)^dagger E_j U_S(tau)
  std::vector<Operator> det_effects;   // F_k(-tau) = U_D(tau)^dagger F_k U_D(tau)
  Operator r_tau;                      // R(tau) = sum_k w_k R_k F_k(-tau)
  Operator rho_i;
  Operator rho_0;

  Eigen::Index dim_s() const { return rho_i.rows(); }
  Eigen::Index dim_d() const { return rho_0.rows(); }
};

InteractionPicture interaction_picture(const Scenario& s);

// Time-dependent weak values for one postselection outcome. a_w and b_w carry
// the lambda g(t) and lambda^2 g(t) g(t') factors; entries at g = 0 are zero.
struct WeakValueTrace {
  std::vector<Complex> a_w;
  Eigen::MatrixXcd b_w;
  double denom = 0.0;  // Tr_S[E_f(-tau) rho_i]
};

WeakValueTrace weak_value_trace(const Scenario& s, std::string_view f_label,
                                double floor = Tolerances::denominator_floor);
WeakValueTrace weak_value_trace(const InteractionPicture& ip, const PovmOutcome& outcome,
                                Eigen::Index j, double floor = Tolerances::denominator_floor);

// Rational-form joint distribution: numerators Q[k, j] (rows detector k,
// columns system j, weights included) over N(lambda) = sum Q.
struct PerturbativeDistribution {
  RealMatrix q;
  double n_lambda = 0.0;

  RealMatrix probability() const { return q / n_lambda; }
  double system_marginal(Eigen::Index j) const { return q.col(j).sum() / n_lambda; }
  RealVector conditional(Eigen::Index j, double floor = Tolerances::denominator_floor) const;
};

// Q = w_j w_k Tr[(E_j(-tau) x F_k(-tau)) M rho M^dagger], M = 1 + i lambda V,
// V = sum_k dt g_k A(t_k) x X(t_k).
PerturbativeDistribution perturbative_joint(const Scenario& s);

// Same distribution assembled from weak values and detector-only traces.
PerturbativeDistribution perturbative_joint_weakvalue_form(
    const Scenario& s, double floor = Tolerances::denominator_floor);

double postselection_probability(const Scenario& s, std::string_view f_label,
                                 double floor = Tolerances::denominator_floor);

struct MainFormulaResult {
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  // Denominator contributions: -2 int <X> A'' and the B_w double integral.
  double first_order = 0.0;
  double second_order = 0.0;
  // Imaginary residues of numerator and denominator (roundoff only).
  double imag_residue = 0.0;
  bool nonperturbative = false;
};

// Second-order conditional average of the readout given postselection f.
MainFormulaResult conditional_average_main(const Scenario& s, std::string_view f_label,
                                           double floor = Tolerances::denominator_floor);

// W(t_k) = A_w(t_k) [X(t_k) - <X(t_k)>_0], on the detector space.
Operator force_term(const Scenario& s, std::string_view f_label, std::size_t k,
                    double floor = Tolerances::denominator_floor);

// <R(tau)>_0 + i int dt <R(tau) W(t) - W^dagger(t) R(tau)>_0
double modified_kubo(const Scenario& s, std::string_view f_label,
                     double floor = Tolerances::denominator_floor);

// Linear response with the unconditioned force lambda g(t) Tr[A(t) rho_i].
double ordinary_kubo(const Scenario& s);

// Second-order Taylor polynomial of the rational joint and conditional
// probabilities. Entries may be negative; nothing is clamped.
struct TaylorDistribution {
  RealMatrix joint;        // rows detector k, columns system j
  RealMatrix conditional;  // P(R_k | f_j); NaN columns where the zeroth order vanishes
  double min_joint = 0.0;
  double min_conditional = 0.0;
  bool negative = false;   // some entry below -1e-12
};

TaylorDistribution naive_taylor_probability(const Scenario& s);

// Threshold above which the second-order terms mark a result nonperturbative.
inline constexpr double kNonperturbativeThreshold = 0.5;

}  // namespace wmkubo
