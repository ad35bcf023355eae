#include "wmkubo/model.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace wmkubo {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

DensityState DensityState::pure(const Eigen::Ref<const Eigen::VectorXcd>& psi) {
  const Eigen::VectorXcd n = psi.normalized();
  return DensityState{n * n.adjoint()};
}

DensityState DensityState::maximally_mixed(Eigen::Index dim) {
  return DensityState{identity(dim) / static_cast<double>(dim)};
}

std::vector<std::string> density_findings(const DensityState& rho, std::string_view name,
                                          double tol) {
  std::vector<std::string> out;
  const std::string n(name);
  if (rho.op.rows() == 0 || rho.op.rows() != rho.op.cols()) {
    out.push_back(n + ": state is empty or not square");
    return out;
  }
  if (!rho.op.allFinite()) {
    out.push_back(n + ": state has non-finite entries");
    return out;
  }
  if (!is_hermitian(rho.op, tol)) {
    out.push_back(n + ": state is not Hermitian (deviation " +
                  fmt(max_abs(rho.op - rho.op.adjoint())) + ")");
    return out;
  }
  const double lo = min_eigenvalue(rho.op);
  if (lo < -tol) out.push_back(n + ": state has negative eigenvalue " + fmt(lo));
  const double tr = rho.op.trace().real();
  if (std::abs(tr - 1.0) >= tol) out.push_back(n + ": trace is " + fmt(tr) + ", expected 1");
  return out;
}

std::size_t Povm::index_of(std::string_view label) const {
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].label == label) return k;
  }
  throw std::out_of_range("no POVM outcome labelled '" + std::string(label) + "'");
}

Povm Povm::trivial(Eigen::Index dim, std::string label) {
  return Povm{{PovmOutcome{std::move(label), 1.0, identity(dim), 1.0}}};
}

Povm Povm::projective(const Eigen::Ref<const Operator>& basis, const std::vector<double>& values,
                      const std::vector<std::string>& labels) {
  if (static_cast<std::size_t>(basis.cols()) != values.size() || values.size() != labels.size()) {
    throw std::invalid_argument("Povm::projective: basis/values/labels size mismatch");
  }
  Povm p;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    const Eigen::VectorXcd v = basis.col(k);
    p.outcomes.push_back(PovmOutcome{labels[k], values[k], v * v.adjoint(), 1.0});
  }
  return p;
}

std::vector<std::string> povm_findings(const Povm& povm, Eigen::Index dim, std::string_view name,
                                       double completeness_tol) {
  std::vector<std::string> out;
  const std::string n(name);
  if (povm.outcomes.empty()) {
    out.push_back(n + ": POVM has no outcomes");
    return out;
  }
  std::set<std::string> labels;
  Operator total = Operator::Zero(dim, dim);
  bool shapes_ok = true;
  for (const auto& o : povm.outcomes) {
    if (!labels.insert(o.label).second) out.push_back(n + ": duplicate label '" + o.label + "'");
    if (o.effect.rows() != dim || o.effect.cols() != dim) {
      out.push_back(n + ": effect '" + o.label + "' has wrong dimension");
      shapes_ok = false;
      continue;
    }
    if (!std::isfinite(o.value)) out.push_back(n + ": value of '" + o.label + "' is not finite");
    if (!std::isfinite(o.weight) || o.weight < 0.0) {
      out.push_back(n + ": weight of '" + o.label + "' is negative or not finite");
    }
    if (!o.effect.allFinite()) {
      out.push_back(n + ": effect '" + o.label + "' has non-finite entries");
      shapes_ok = false;
      continue;
    }
    if (!is_psd(o.effect, Tolerances::structural)) {
      out.push_back(n + ": effect '" + o.label + "' is not positive semidefinite");
    }
    total += o.weight * o.effect;
  }
  if (shapes_ok) {
    const double dev = max_abs(total - identity(dim));
    if (dev >= completeness_tol) {
      out.push_back(n + ": completeness violated, max |sum w E - I| = " + fmt(dev));
    }
  }
  return out;
}

Operator pointer_operator(const Povm& povm, double completeness_tol) {
  if (povm.outcomes.empty()) throw InvalidScenarioError("pointer_operator: empty POVM");
  const Eigen::Index dim = povm.outcomes.front().effect.rows();
  const auto findings = povm_findings(povm, dim, "povm", completeness_tol);
  if (!findings.empty()) throw InvalidScenarioError("pointer_operator: " + findings.front());
  Operator r = Operator::Zero(dim, dim);
  for (const auto& o : povm.outcomes) r += (o.weight * o.value) * o.effect;
  return r;
}

DensityState retrodiction_state(const PovmOutcome& outcome) {
  const double tr = outcome.effect.trace().real();
  if (!(tr > 1e-12)) {
    throw std::domain_error("retrodiction_state: effect '" + outcome.label +
                            "' has trace " + fmt(tr));
  }
  Operator rho = outcome.effect / tr;
  rho = (rho + rho.adjoint()).eval() / 2.0;
  return DensityState{rho};
}

// ---------------------------------------------------------------------------
// Coupling profiles

double CouplingProfile::integral() const {
  double sum = 0.0;
  for (double g : samples) sum += g;
  return sum * dt();
}

std::string_view to_string(CouplingProfile::Shape shape) {
  switch (shape) {
    case CouplingProfile::Shape::samples: return "samples";
    case CouplingProfile::Shape::boxcar: return "boxcar";
    case CouplingProfile::Shape::delta: return "delta";
    case CouplingProfile::Shape::sin2: return "sin2";
  }
  return "samples";
}

CouplingProfile::Shape shape_from_string(std::string_view name) {
  if (name == "samples") return CouplingProfile::Shape::samples;
  if (name == "boxcar") return CouplingProfile::Shape::boxcar;
  if (name == "delta") return CouplingProfile::Shape::delta;
  if (name == "sin2") return CouplingProfile::Shape::sin2;
  throw std::invalid_argument("unknown coupling shape '" + std::string(name) + "'");
}

CouplingProfile CouplingProfile::resampled(std::size_t n_t) const {
  switch (shape) {
    case Shape::boxcar: return boxcar(tau, n_t, lambda, begin, end);
    case Shape::delta: return delta(tau, n_t, lambda);
    case Shape::sin2: return sin2(tau, n_t, lambda, begin, end);
    case Shape::samples: break;
  }
  throw std::logic_error("CouplingProfile: explicitly sampled profiles cannot be resampled");
}

namespace {

void check_grid(double tau, std::size_t n_t, double begin, double end) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("coupling: tau must be positive");
  if (n_t == 0) throw std::invalid_argument("coupling: n_t must be positive");
  if (!(begin >= 0.0 && end <= tau && begin < end)) {
    throw std::invalid_argument("coupling: window must satisfy 0 <= begin < end <= tau");
  }
}

}  // namespace

CouplingProfile CouplingProfile::boxcar(double tau, std::size_t n_t, double lambda, double begin,
                                        double end) {
  check_grid(tau, n_t, begin, end);
  CouplingProfile p{tau, lambda, std::vector<double>(n_t, 0.0), Shape::boxcar, begin, end};
  std::size_t count = 0;
  for (std::size_t k = 0; k < n_t; ++k) {
    const double t = p.time(k);
    if (t >= begin && t < end) ++count;
  }
  if (count == 0) throw std::invalid_argument("coupling: boxcar window contains no grid midpoint");
  const double height = 1.0 / (static_cast<double>(count) * p.dt());
  for (std::size_t k = 0; k < n_t; ++k) {
    const double t = p.time(k);
    if (t >= begin && t < end) p.samples[k] = height;
  }
  return p;
}

CouplingProfile CouplingProfile::delta(double tau, std::size_t n_t, double lambda) {
  check_grid(tau, n_t, 0.0, tau);
  CouplingProfile p{tau, lambda, std::vector<double>(n_t, 0.0), Shape::delta, 0.0, 0.0};
  p.samples[0] = 1.0 / p.dt();
  p.end = p.dt();
  return p;
}

CouplingProfile CouplingProfile::sin2(double tau, std::size_t n_t, double lambda, double begin,
                                      double end) {
  check_grid(tau, n_t, begin, end);
  CouplingProfile p{tau, lambda, std::vector<double>(n_t, 0.0), Shape::sin2, begin, end};
  double sum = 0.0;
  for (std::size_t k = 0; k < n_t; ++k) {
    const double t = p.time(k);
    if (t >= begin && t < end) {
      const double s = std::sin(std::numbers::pi * (t - begin) / (end - begin));
      p.samples[k] = s * s;
      sum += s * s;
    }
  }
  if (!(sum > 0.0)) throw std::invalid_argument("coupling: sin2 window contains no grid midpoint");
  for (double& g : p.samples) g /= sum * p.dt();
  return p;
}

CouplingProfile CouplingProfile::from_samples(double tau, double lambda,
                                              std::vector<double> samples) {
  CouplingProfile p{tau, lambda, std::move(samples), Shape::samples, 0.0, tau};
  return p;
}

// ---------------------------------------------------------------------------
// Scenario

Scenario Scenario::with_lambda(double lambda) const {
  Scenario s = *this;
  s.coupling.lambda = lambda;
  return s;
}

Scenario Scenario::with_resolution(std::size_t n_t) const {
  Scenario s = *this;
  s.coupling = coupling.resampled(n_t);
  return s;
}

Scenario Scenario::with_trivial_postselection() const {
  Scenario s = *this;
  s.sys_povm = Povm::trivial(dim_s);
  return s;
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report;
  auto& f = report.findings;
  if (s.dim_s <= 0 || s.dim_d <= 0) {
    f.push_back("dimensions must be positive");
    return report;
  }
  const auto check_op = [&](const Operator& op, Eigen::Index dim, const char* name) {
    if (op.rows() != dim || op.cols() != dim) {
      f.push_back(std::string(name) + ": expected " + std::to_string(dim) + "x" +
                  std::to_string(dim) + ", got " + std::to_string(op.rows()) + "x" +
                  std::to_string(op.cols()));
      return;
    }
    if (!op.allFinite()) {
      f.push_back(std::string(name) + ": non-finite entries");
      return;
    }
    if (!is_hermitian(op)) f.push_back(std::string(name) + ": not Hermitian");
  };
  check_op(s.h_s, s.dim_s, "h_s");
  check_op(s.h_d, s.dim_d, "h_d");
  check_op(s.a_obs, s.dim_s, "a_obs");
  check_op(s.x_obs, s.dim_d, "x_obs");

  if (s.rho_i.dim() != s.dim_s) {
    f.push_back("rho_i: dimension does not match dim_s");
  } else {
    for (auto& m : density_findings(s.rho_i, "rho_i")) f.push_back(std::move(m));
  }
  if (s.rho_0.dim() != s.dim_d) {
    f.push_back("rho_0: dimension does not match dim_d");
  } else {
    for (auto& m : density_findings(s.rho_0, "rho_0")) f.push_back(std::move(m));
  }
  for (auto& m : povm_findings(s.sys_povm, s.dim_s, "sys_povm", s.completeness_tol)) {
    f.push_back(std::move(m));
  }
  for (auto& m : povm_findings(s.det_povm, s.dim_d, "det_povm", s.completeness_tol)) {
    f.push_back(std::move(m));
  }

  const auto& c = s.coupling;
  if (!(c.tau > 0.0) || !std::isfinite(c.tau)) f.push_back("coupling: tau must be positive");
  if (c.samples.empty()) {
    f.push_back("coupling: no samples");
  } else if (std::any_of(c.samples.begin(), c.samples.end(),
                         [](double g) { return !std::isfinite(g); })) {
    f.push_back("coupling: non-finite sample");
  } else if (std::abs(c.integral() - 1.0) >= Tolerances::normalization) {
    f.push_back("coupling: integral of g is " + fmt(c.integral()) + ", expected 1");
  }
  if (!std::isfinite(c.lambda)) f.push_back("coupling: lambda is not finite");
  return report;
}

void require_valid(const Scenario& s) {
  const auto report = validate_scenario(s);
  if (report.ok()) return;
  std::string msg = "invalid scenario '" + s.name + "':";
  for (const auto& m : report.findings) msg += "\n  " + m;
  throw InvalidScenarioError(msg);
}

// ---------------------------------------------------------------------------
// Presets

namespace {

class Params {
 public:
  Params(std::string_view preset, const PresetParams& given, PresetParams defaults)
      : preset_(preset), values_(std::move(defaults)) {
    for (const auto& [key, value] : given) {
      if (!values_.count(key)) {
        throw std::invalid_argument("preset '" + preset_ + "': unknown parameter '" + key + "'");
      }
      if (!std::isfinite(value)) {
        throw std::invalid_argument("preset '" + preset_ + "': parameter '" + key +
                                    "' is not finite");
      }
      values_[key] = value;
      given_.insert(key);
    }
  }
  double operator[](const std::string& key) const { return values_.at(key); }
  bool given(const std::string& key) const { return given_.count(key) > 0; }
  std::size_t count(const std::string& key, double min) const {
    const double v = values_.at(key);
    if (v < min || v != std::floor(v)) {
      throw std::invalid_argument("preset '" + preset_ + "': parameter '" + key +
                                  "' must be an integer >= " + std::to_string(min));
    }
    return static_cast<std::size_t>(v);
  }

 private:
  std::string preset_;
  PresetParams values_;
  std::set<std::string> given_;
};

Operator pauli_x() {
  Operator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Operator pauli_z() {
  Operator m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
Eigen::VectorXcd bloch_ket(double theta, double phi) {
  Eigen::VectorXcd v(2);
  v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  return v;
}

Operator orthonormal_pair(const Eigen::VectorXcd& v) {
  Operator basis(2, 2);
  basis.col(0) = v;
  basis.col(1) << -std::conj(v(1)), std::conj(v(0));
  return basis;
}

Scenario make_aav_gaussian(const PresetParams& given) {
  const Params p("aav_gaussian", given,
                 {{"epsilon", 0.1}, {"lambda", 0.01}, {"det_dim", 60}, {"n_t", 1024}, {"tau", 1.0},
                  {"phase", 0.0}});
  const auto det_dim = static_cast<Eigen::Index>(p.count("det_dim", 40));
  const std::size_t n_t = p.count("n_t", 1);
  const double eps = p["epsilon"];
  if (!(eps > 0.0 && eps < std::numbers::pi)) {
    throw std::invalid_argument("preset 'aav_gaussian': epsilon must lie in (0, pi)");
  }

  Scenario s;
  s.name = "aav_gaussian";
  s.dim_s = 2;
  s.dim_d = det_dim;
  s.h_s = Operator::Zero(2, 2);
  s.h_d = Operator::Zero(det_dim, det_dim);
  s.a_obs = pauli_z();

  // Truncated oscillator: X = position quadrature, readout R = momentum.
  Operator lower = Operator::Zero(det_dim, det_dim);
  for (Eigen::Index n = 1; n < det_dim; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Operator raise = lower.adjoint();
  s.x_obs = (lower + raise) / std::numbers::sqrt2;
  const Operator momentum = Complex(0, 1) * (raise - lower) / std::numbers::sqrt2;

  // |i> = (|0> + |1>)/sqrt2; |f> = cos(th)|0> + e^{i phase} sin(th)|1>,
  // th = eps - pi/4. At phase 0, <f|i> = sin(eps) and the weak value of
  // sigma_z is cot(eps); a nonzero phase makes it complex.
  Eigen::VectorXcd pre(2);
  pre << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  s.rho_i = DensityState::pure(pre);
  const double th = eps - std::numbers::pi / 4;
  Eigen::VectorXcd post(2);
  post << std::cos(th), std::polar(std::sin(th), p["phase"]);
  s.sys_povm = Povm::projective(orthonormal_pair(post), {1.0, -1.0}, {"+", "-"});

  Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(det_dim);
  ground(0) = 1.0;
  s.rho_0 = DensityState::pure(ground);

  Eigen::SelfAdjointEigenSolver<Operator> solver((momentum + momentum.adjoint()) / 2.0);
  std::vector<double> values(det_dim);
  std::vector<std::string> labels(det_dim);
  for (Eigen::Index k = 0; k < det_dim; ++k) {
    values[k] = solver.eigenvalues()(k);
    std::ostringstream os;
    os << "p" << k;
    labels[k] = os.str();
  }
  s.det_povm = Povm::projective(solver.eigenvectors(), values, labels);

  s.coupling = CouplingProfile::delta(p["tau"], n_t, p["lambda"]);
  s.completeness_tol = 1e-6;
  s.metadata["coupling_width"] = std::to_string(s.coupling.dt());
  s.metadata["truncation"] = std::to_string(det_dim);
  s.metadata["completeness_tol"] = "1e-6 (truncated oscillator)";
  const Complex bra1 = std::polar(std::sin(th), -p["phase"]);
  const Complex wv = (std::cos(th) - bra1) / (std::cos(th) + bra1);
  s.metadata["weak_value_sigma_z"] = std::to_string(wv.real()) + " + " + std::to_string(wv.imag()) + "i";
  return s;
}

Scenario make_qubit_qubit(const PresetParams& given) {
  const Params p("qubit_qubit", given,
                 {{"lambda", 0.05}, {"n_t", 1024}, {"tau", 2.0}, {"omega_s", 1.0}, {"omega_d", 0.8}});
  const std::size_t n_t = p.count("n_t", 1);
  const double tau = p["tau"];

  Scenario s;
  s.name = "qubit_qubit";
  s.dim_s = 2;
  s.dim_d = 2;
  // A = sigma_x precesses under H_S; R = sigma_z precesses under H_D while the
  // coupling operator X = sigma_x is conserved.
  s.h_s = 0.5 * p["omega_s"] * pauli_z();
  s.h_d = 0.5 * p["omega_d"] * pauli_x();
  s.a_obs = pauli_x();
  s.x_obs = pauli_x();
  s.rho_i = DensityState::pure(bloch_ket(1.1, 0.6));
  s.rho_0 = DensityState::pure(bloch_ket(0.7, 0.9));
  // Postselection basis chosen so that its back-propagated "+" state sits at
  // Bloch angles (1.4, 2.0): overlap with rho_i ~ 0.61 for every omega_s.
  const double drift = p["omega_s"] * tau;
  s.sys_povm =
      Povm::projective(orthonormal_pair(bloch_ket(1.4, 2.0 + drift)), {1.0, -1.0}, {"+", "-"});
  s.det_povm = Povm::projective(identity(2), {1.0, -1.0}, {"up", "down"});
  s.coupling = CouplingProfile::boxcar(tau, n_t, p["lambda"], 0.25 * tau, 0.75 * tau);
  return s;
}

// Random scenario parametrization (replayable from the seed alone):
//  - dims drawn from {2, 3} unless given;
//  - Hermitian operators U diag(d) U^dagger, U Haar (QR of a complex Ginibre
//    matrix with phase fix), d uniform in [-1, 1];
//  - states U diag(p) U^dagger, p flat-Dirichlet;
//  - POVMs from Ginibre Gram matrices G_k, E_k = S^{-1/2} G_k S^{-1/2} with
//    S = sum G_k, values uniform in [-1, 1], weights uniform in [0.5, 1.5];
//  - coupling sin2 or boxcar on [b, e], b/tau in [0, 0.3], e/tau in [0.7, 1].
class ScenarioSampler {
 public:
  explicit ScenarioSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  Operator ginibre(Eigen::Index dim) {
    std::normal_distribution<double> normal;
    Operator z(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) z(i, j) = Complex(normal(rng_), normal(rng_));
    }
    return z;
  }

  Operator haar_unitary(Eigen::Index dim) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre(dim));
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double mag = std::abs(r(k, k));
      if (mag > 0.0) q.col(k) *= r(k, k) / mag;
    }
    return q;
  }

  Operator hermitian(Eigen::Index dim) {
    const Operator u = haar_unitary(dim);
    Eigen::VectorXcd d(dim);
    for (Eigen::Index k = 0; k < dim; ++k) d(k) = uniform(-1.0, 1.0);
    const Operator h = u * d.asDiagonal() * u.adjoint();
    return (h + h.adjoint()) / 2.0;
  }

  DensityState density(Eigen::Index dim) {
    std::exponential_distribution<double> expo(1.0);
    Eigen::VectorXd p(dim);
    for (Eigen::Index k = 0; k < dim; ++k) p(k) = expo(rng_) + 1e-3;
    p /= p.sum();
    const Operator u = haar_unitary(dim);
    const Operator rho = u * p.cast<Complex>().asDiagonal() * u.adjoint();
    return DensityState{(rho + rho.adjoint()) / 2.0};
  }

  Povm povm(Eigen::Index dim, std::size_t n_out) {
    std::vector<Operator> grams;
    Operator total = Operator::Zero(dim, dim);
    for (std::size_t k = 0; k < n_out; ++k) {
      const Operator b = ginibre(dim);
      grams.push_back(b * b.adjoint());
      total += grams.back();
    }
    const Operator inv_sqrt = positive_power(total, -0.5);
    Povm out;
    for (std::size_t k = 0; k < n_out; ++k) {
      Operator e = inv_sqrt * grams[k] * inv_sqrt;
      e = (e + e.adjoint()).eval() / 2.0;
      const double w = uniform(0.5, 1.5);
      out.outcomes.push_back(PovmOutcome{std::to_string(k), uniform(-1.0, 1.0), e / w, w});
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

Scenario make_random_seeded(const PresetParams& given) {
  const Params p("random_seeded", given,
                 {{"seed", 0}, {"dim_s", 0}, {"dim_d", 0}, {"n_t", 32}, {"lambda", -1.0}});
  const auto seed = static_cast<std::uint64_t>(p.count("seed", 0));
  ScenarioSampler rng(seed);

  Scenario s;
  s.name = "random_seeded";
  s.metadata["seed"] = std::to_string(seed);
  const std::size_t ds = rng.pick(2, 3);
  const std::size_t dd = rng.pick(2, 3);
  s.dim_s = static_cast<Eigen::Index>(p.given("dim_s") ? p.count("dim_s", 1) : ds);
  s.dim_d = static_cast<Eigen::Index>(p.given("dim_d") ? p.count("dim_d", 1) : dd);
  s.h_s = rng.hermitian(s.dim_s);
  s.h_d = rng.hermitian(s.dim_d);
  s.a_obs = rng.hermitian(s.dim_s);
  s.x_obs = rng.hermitian(s.dim_d);
  s.rho_i = rng.density(s.dim_s);
  s.rho_0 = rng.density(s.dim_d);
  s.sys_povm = rng.povm(s.dim_s, rng.pick(2, 3));
  s.det_povm = rng.povm(s.dim_d, rng.pick(2, 4));

  const double tau = rng.uniform(0.5, 2.0);
  const bool smooth = rng.pick(0, 1) == 1;
  const double begin = rng.uniform(0.0, 0.3) * tau;
  const double end = rng.uniform(0.7, 1.0) * tau;
  const double lambda = rng.uniform(0.05, 0.3);
  const std::size_t n_t = p.count("n_t", 1);
  const double lam = p.given("lambda") ? p["lambda"] : lambda;
  s.coupling = smooth ? CouplingProfile::sin2(tau, n_t, lam, begin, end)
                      : CouplingProfile::boxcar(tau, n_t, lam, begin, end);
  return s;
}

Scenario make_taylor_negativity(const PresetParams& given) {
  const Params p("taylor_negativity", given, {{"lambda", PinnedNegativity::lambda}});
  Scenario s = make_random_seeded({{"seed", static_cast<double>(PinnedNegativity::seed)},
                                   {"lambda", p["lambda"]}});
  s.name = "taylor_negativity";
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"aav_gaussian", "qubit_qubit", "random_seeded", "taylor_negativity"};
}

Scenario preset(std::string_view name, const PresetParams& params) {
  if (name == "aav_gaussian") return make_aav_gaussian(params);
  if (name == "qubit_qubit") return make_qubit_qubit(params);
  if (name == "random_seeded") return make_random_seeded(params);
  if (name == "taylor_negativity") return make_taylor_negativity(params);
  throw UnknownPresetError("unknown preset '" + std::string(name) + "'");
}

}  // namespace wmkubo
