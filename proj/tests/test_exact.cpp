#include "wmkubo/exact.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace wmkubo;

namespace {

using Dense = Eigen::MatrixXcd;

Dense expm_step(const Dense& h, double dt) { return (Complex(0, -dt) * h).exp(); }

Dense kron(const Dense& a, const Dense& b) {
  Dense out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Second evolution route: steps the density matrix directly with Pade
// exponentials and reads probabilities off full traces.
Dense stepper_joint(const Scenario& s) {
  const Dense is = Dense::Identity(s.dim_s, s.dim_s), id = Dense::Identity(s.dim_d, s.dim_d);
  const Dense h0 = kron(Dense(s.h_s), id) + kron(is, Dense(s.h_d));
  const Dense v = kron(Dense(s.a_obs), Dense(s.x_obs));
  Dense rho = kron(Dense(s.rho_i.op), Dense(s.rho_0.op));
  const double dt = s.coupling.dt();
  for (double g : s.coupling.samples) {
    const Dense u = expm_step(h0 - s.lambda() * g * v, dt);
    rho = u * rho * u.adjoint();
  }
  Dense p(s.det_povm.size(), s.sys_povm.size());
  for (std::size_t j = 0; j < s.sys_povm.size(); ++j)
    for (std::size_t k = 0; k < s.det_povm.size(); ++k) {
      const auto& e = s.sys_povm.outcomes[j];
      const auto& f = s.det_povm.outcomes[k];
      p(k, j) = e.weight * f.weight * (kron(Dense(e.effect), Dense(f.effect)) * rho).trace();
    }
  return p;
}

Operator pauli_z() {
  Operator z = Operator::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  return z;
}

}  // namespace

TEST_CASE("decoupled propagator factorizes") {
  const Scenario s = preset("random_seeded", {{"seed", 21}, {"lambda", 0.0}});
  const double tau = s.coupling.tau;
  const Operator expected = tensor_product(hermitian_exp(s.h_s, tau), hermitian_exp(s.h_d, tau));
  CHECK(max_abs(full_propagator(s) - expected) < 1e-12);
}

TEST_CASE("commuting generators match the closed form") {
  Scenario s = preset("qubit_qubit", {{"lambda", 0.3}});
  s.h_s = 0.7 * pauli_z();
  s.a_obs = pauli_z();  // [A, H_S] = 0 and [X, H_D] = 0 with X = sigma_x
  const Dense h0 = kron(Dense(s.h_s), Dense::Identity(2, 2)) + kron(Dense::Identity(2, 2), Dense(s.h_d));
  const Dense v = kron(Dense(s.a_obs), Dense(s.x_obs));
  // int g dt = 1, so the coupling phase is lambda * A x X.
  const Dense expected = (Complex(0, -1) * (h0 * s.coupling.tau - s.lambda() * v)).exp();
  CHECK(max_abs(Dense(full_propagator(s)) - expected) < 1e-11);
}

TEST_CASE("propagator is unitary and ordered with later times on the left") {
  const Scenario s = preset("random_seeded", {{"seed", 2}, {"lambda", 0.8}});
  const Operator u = full_propagator(s);
  CHECK(is_unitary(u, 1e-12));

  const Dense h0 = kron(Dense(s.h_s), Dense::Identity(s.dim_d, s.dim_d)) +
                   kron(Dense::Identity(s.dim_s, s.dim_s), Dense(s.h_d));
  const Dense v = kron(Dense(s.a_obs), Dense(s.x_obs));
  Dense ordered = Dense::Identity(u.rows(), u.cols());
  for (double g : s.coupling.samples) ordered = expm_step(h0 - s.lambda() * g * v, s.coupling.dt()) * ordered;
  CHECK(max_abs(Dense(u) - ordered) < 1e-11);
}

TEST_CASE("qubit_qubit matches an independent density-matrix stepper") {
  const Scenario s = preset("qubit_qubit", {{"lambda", 0.05}, {"n_t", 256}});
  const JointDistribution p = exact_joint(s);
  const Dense oracle = stepper_joint(s);
  CHECK(max_abs(Dense(p.p.cast<Complex>()) - oracle) < 1e-12);
  CHECK(std::abs(oracle.imag().maxCoeff()) < 1e-12);
}

TEST_CASE("random scenario matches the stepper") {
  const Scenario s = preset("random_seeded", {{"seed", 17}, {"lambda", 1.2}});
  CHECK(max_abs(Dense(exact_joint(s).p.cast<Complex>()) - stepper_joint(s)) < 1e-12);
}

TEST_CASE("no interaction factorizes the joint distribution") {
  const Scenario s = preset("random_seeded", {{"seed", 5}, {"lambda", 0.0}});
  const JointDistribution joint = exact_joint(s);
  const RealVector det = joint.detector_marginal();
  CHECK(joint.total() == doctest::Approx(1.0).epsilon(1e-12));
  for (Eigen::Index j = 0; j < joint.p.cols(); ++j)
    for (Eigen::Index k = 0; k < joint.p.rows(); ++k)
      CHECK(std::abs(joint.p(k, j) - det(k) * joint.system_marginal(j)) < 1e-10);
}

TEST_CASE("trivial postselection has unit marginal") {
  const Scenario s = preset("random_seeded", {{"seed", 6}}).with_trivial_postselection();
  const JointDistribution joint = exact_joint(s);
  CHECK(joint.p.cols() == 1);
  CHECK(joint.system_marginal(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("grid self-convergence on qubit_qubit") {
  const Scenario coarse = preset("qubit_qubit", {{"n_t", 1024}});
  const Scenario fine = preset("qubit_qubit", {{"n_t", 2048}});
  CHECK(max_abs(exact_joint(coarse).p - exact_joint(fine).p) < 1e-8);
}

TEST_CASE("conditional average") {
  SUBCASE("decoupled detector ignores the postselection") {
    const Scenario s = preset("random_seeded", {{"seed", 8}, {"lambda", 0.0}});
    const Operator r = pointer_operator(s.det_povm);
    const Operator rd = hermitian_exp(s.h_d, s.coupling.tau);
    const double expected = (r * rd * s.rho_0.op * rd.adjoint()).trace().real();
    for (const auto& o : s.sys_povm.outcomes)
      CHECK(exact_conditional_average(s, o.label) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("constant readout") {
    Scenario s = preset("random_seeded", {{"seed", 8}, {"lambda", 0.9}});
    for (auto& o : s.det_povm.outcomes) o.value = -0.4;
    for (const auto& o : s.sys_povm.outcomes)
      CHECK(exact_conditional_average(s, o.label) == doctest::Approx(-0.4).epsilon(1e-12));
  }
  SUBCASE("postselection below the floor") {
    Scenario s = preset("qubit_qubit");
    s.rho_i = DensityState::pure(Eigen::VectorXcd(s.sys_povm.outcomes[1].effect.col(0)));
    s.h_s.setZero();
    s = s.with_lambda(0.0);
    CHECK_THROWS_AS(exact_conditional_average(s, "+", 1e-12), PostselectionFloorError);
    try {
      exact_conditional_average(s, "+", 1e-12);
    } catch (const PostselectionFloorError& e) {
      CHECK(e.floor() == 1e-12);
      CHECK(e.value() <= 1e-12);
    }
  }
  CHECK_THROWS_AS(exact_conditional_average(preset("qubit_qubit"), "nope"), std::out_of_range);
}

TEST_CASE("invalid scenarios are rejected by the engine") {
  Scenario s = preset("qubit_qubit");
  s.rho_i.op *= 1.1;
  CHECK_THROWS_AS(exact_joint(s), InvalidScenarioError);
}
