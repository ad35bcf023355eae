#include "wmkubo/model.hpp"
#include "wmkubo/perturbation.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace wmkubo;

namespace {

bool mentions(const ValidationReport& r, std::string_view needle) {
  for (const auto& f : r.findings)
    if (f.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("pointer operator of a projective qubit POVM is sigma_z") {
  const Povm p = Povm::projective(identity(2), {1.0, -1.0}, {"up", "down"});
  Operator z = Operator::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  CHECK(max_abs(pointer_operator(p) - z) == 0.0);
}

TEST_CASE("constant readout gives a multiple of the identity") {
  Povm p = preset("random_seeded", {{"seed", 3}, {"dim_d", 3}}).det_povm;
  for (auto& o : p.outcomes) o.value = 0.37;
  CHECK(max_abs(pointer_operator(p) - 0.37 * identity(3)) < 1e-12);
}

TEST_CASE("pointer operator matches a direct weighted sum") {
  // Independent construction: random Gram effects normalised by hand.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::vector<Eigen::MatrixXcd> grams;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(3, 3);
  for (int k = 0; k < 3; ++k) {
    Eigen::MatrixXcd b(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = Complex(normal(rng), normal(rng));
    grams.push_back(b * b.adjoint());
    total += grams.back();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(total);
  const Eigen::MatrixXcd inv_sqrt = es.operatorInverseSqrt();
  const double values[3] = {0.5, -1.25, 2.0};
  const double weights[3] = {1.0, 0.5, 2.0};
  Povm p;
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(3, 3);
  for (int k = 0; k < 3; ++k) {
    const Eigen::MatrixXcd e = inv_sqrt * grams[k] * inv_sqrt;
    p.outcomes.push_back({std::to_string(k), values[k], Operator(e / weights[k]), weights[k]});
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) expected(i, j) += values[k] * e(i, j);
  }
  CHECK(max_abs(Eigen::MatrixXcd(pointer_operator(p)) - expected) < 1e-12);
}

TEST_CASE("pointer operator rejects an incomplete POVM") {
  Povm p = Povm::projective(identity(2), {1.0, -1.0}, {"up", "down"});
  p.outcomes.pop_back();
  CHECK_THROWS_AS(pointer_operator(p), InvalidScenarioError);
}

TEST_CASE("retrodiction state") {
  Eigen::VectorXcd psi(2);
  psi << Complex(0.6, 0.0), Complex(0.0, 0.8);
  const Operator proj = psi * psi.adjoint();
  CHECK(max_abs(retrodiction_state({"f", 1.0, proj, 1.0}).op - proj) < 1e-15);
  CHECK(max_abs(retrodiction_state({"f", 1.0, 0.3 * identity(2), 1.0}).op - identity(2) / 2.0) <
        1e-15);
  CHECK_THROWS_AS(retrodiction_state({"f", 1.0, Operator::Zero(2, 2), 1.0}), std::domain_error);

  const Scenario s = preset("random_seeded", {{"seed", 9}});
  for (const auto& o : s.sys_povm.outcomes) {
    const DensityState r = retrodiction_state(o);
    CHECK(std::abs(r.op.trace() - 1.0) < 1e-13);
    CHECK(is_psd(r.op));
    CHECK(max_abs(Operator(r.op * o.effect.trace().real()) - o.effect) < 1e-13);
  }
}

TEST_CASE("shipped presets validate") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ValidationReport r = validate_scenario(preset(name));
    CHECK(r.ok());
  }
}

TEST_CASE("validation flags constructed failures") {
  Scenario s = preset("qubit_qubit");
  SUBCASE("trace 1.1") {
    s.rho_i.op *= 1.1;
    const auto r = validate_scenario(s);
    CHECK(mentions(r, "rho_i: trace"));
    CHECK_THROWS_AS(require_valid(s), InvalidScenarioError);
  }
  SUBCASE("missing outcome") {
    s.det_povm.outcomes.pop_back();
    CHECK(mentions(validate_scenario(s), "det_povm: completeness"));
  }
  SUBCASE("non-Hermitian observable") {
    s.a_obs(0, 1) += Complex(0.0, 0.5);
    CHECK(mentions(validate_scenario(s), "a_obs: not Hermitian"));
  }
  SUBCASE("negative state") {
    s.rho_0.op = Operator::Zero(2, 2);
    s.rho_0.op(0, 0) = 1.5;
    s.rho_0.op(1, 1) = -0.5;
    CHECK(mentions(validate_scenario(s), "rho_0: state has negative eigenvalue"));
  }
  SUBCASE("coupling normalization") {
    s.coupling.samples[s.coupling.size() / 2] += 10.0;
    CHECK(mentions(validate_scenario(s), "coupling: integral"));
  }
  SUBCASE("dimension mismatch") {
    s.x_obs = identity(3);
    CHECK(mentions(validate_scenario(s), "x_obs: expected 2x2"));
  }
}

TEST_CASE("coupling profiles are normalized on every grid") {
  for (std::size_t n : {1u, 7u, 64u, 1024u}) {
    CHECK(CouplingProfile::boxcar(2.0, n, 0.1, 0.5, 1.5).integral() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(CouplingProfile::delta(2.0, n, 0.1).integral() == doctest::Approx(1.0).epsilon(1e-13));
    if (n >= 4) CHECK(CouplingProfile::sin2(2.0, n, 0.1, 0.3, 1.9).integral() == doctest::Approx(1.0).epsilon(1e-13));
  }
  const CouplingProfile box = CouplingProfile::boxcar(2.0, 8, 0.1, 0.5, 1.5);
  CHECK(box.samples.front() == 0.0);
  CHECK(box.samples[3] == doctest::Approx(1.0));
  CHECK(box.time(0) == doctest::Approx(0.125));
  CHECK(box.resampled(16).size() == 16);
  CHECK_THROWS_AS(CouplingProfile::from_samples(1.0, 0.1, {1.0}).resampled(4), std::logic_error);
}

TEST_CASE("random_seeded is deterministic") {
  const Scenario a = preset("random_seeded", {{"seed", 7}});
  const Scenario b = preset("random_seeded", {{"seed", 7}});
  CHECK(max_abs(a.h_s - b.h_s) == 0.0);
  CHECK(max_abs(a.rho_0.op - b.rho_0.op) == 0.0);
  CHECK(a.coupling.samples == b.coupling.samples);
  CHECK(a.det_povm.size() == b.det_povm.size());
  const Scenario c = preset("random_seeded", {{"seed", 8}});
  CHECK(max_abs(a.h_s - c.h_s) > 0.0);
}

TEST_CASE("random_seeded overrides keep the remaining draws") {
  const Scenario a = preset("random_seeded", {{"seed", 4}});
  const Scenario b = preset("random_seeded", {{"seed", 4}, {"lambda", 0.7}});
  CHECK(b.lambda() == 0.7);
  CHECK(a.coupling.samples == b.coupling.samples);
  CHECK(max_abs(a.a_obs - b.a_obs) == 0.0);
}

TEST_CASE("preset parameter checking") {
  CHECK_THROWS_AS(preset("no_such_preset"), UnknownPresetError);
  CHECK_THROWS_AS(preset("qubit_qubit", {{"lamda", 0.1}}), std::invalid_argument);
  CHECK_THROWS_AS(preset("aav_gaussian", {{"det_dim", 10}}), std::invalid_argument);
  CHECK_THROWS_AS(preset("aav_gaussian", {{"n_t", 2.5}}), std::invalid_argument);
  CHECK_THROWS_AS(preset("aav_gaussian", {{"epsilon", 4.0}}), std::invalid_argument);
  CHECK(preset("taylor_negativity").lambda() == PinnedNegativity::lambda);
}

TEST_CASE("aav_gaussian weak value") {
  const double lambda = 0.01;
  SUBCASE("symmetric postselection reduces to the expectation value") {
    const Scenario s = preset("aav_gaussian", {{"epsilon", std::numbers::pi / 2}});
    const WeakValueTrace wv = weak_value_trace(s, "+");
    // Tr[sigma_z rho_i] = 0 for |+>.
    CHECK(std::abs(wv.a_w[0]) < 1e-12);
  }
  SUBCASE("nearly orthogonal postselection exceeds the spectral radius") {
    const Scenario s = preset("aav_gaussian");
    const WeakValueTrace wv = weak_value_trace(s, "+");
    const double normalized = wv.a_w[0].real() / (lambda * s.coupling.samples[0]);
    CHECK(std::abs(normalized) > 1.0);
    CHECK(normalized == doctest::Approx(1.0 / std::tan(0.1)).epsilon(1e-10));
  }
}
