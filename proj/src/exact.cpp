#include "wmkubo/exact.hpp"

#include <map>
#include <sstream>

namespace wmkubo {

RealVector JointDistribution::conditional(Eigen::Index j, double floor) const {
  const double pf = system_marginal(j);
  if (!(pf > floor)) {
    std::ostringstream os;
    os << "postselection probability " << pf << " is below the floor " << floor;
    throw PostselectionFloorError(os.str(), pf, floor);
  }
  return p.col(j) / pf;
}

RealVector detector_values(const Povm& det_povm) {
  RealVector v(static_cast<Eigen::Index>(det_povm.size()));
  for (std::size_t k = 0; k < det_povm.size(); ++k) v(k) = det_povm.outcomes[k].value;
  return v;
}

namespace {

// base^n by repeated squaring; the product of n identical steps.
Operator power(Operator base, std::size_t n) {
  Operator out = identity(base.rows());
  while (n > 0) {
    if (n & 1U) out = (out * base).eval();
    n >>= 1U;
    if (n > 0) base = (base * base).eval();
  }
  return out;
}

}  // namespace

Operator full_propagator(const Scenario& s) {
  require_valid(s);
  const auto& c = s.coupling;
  const double dt = c.dt();
  const Operator h0 = tensor_product(s.h_s, identity(s.dim_d)) +
                      tensor_product(identity(s.dim_s), s.h_d);
  const Operator coupling = tensor_product(s.a_obs, s.x_obs);

  // Steps with equal g share one exponential; runs of equal steps are powered.
  std::map<double, Operator> steps;
  const auto step = [&](double g) -> const Operator& {
    auto it = steps.find(g);
    if (it == steps.end()) {
      const Operator h = h0 - (c.lambda * g) * coupling;
      it = steps.emplace(g, hermitian_exp(h, dt)).first;
    }
    return it->second;
  };

  Operator u = identity(s.dim_s * s.dim_d);
  std::size_t k = 0;
  while (k < c.size()) {
    std::size_t run = 1;
    while (k + run < c.size() && c.samples[k + run] == c.samples[k]) ++run;
    const Operator& factor = step(c.samples[k]);
    u = (run == 1 ? factor : power(factor, run)) * u;
    k += run;
  }
  return u;
}

Operator evolved_state(const Scenario& s) {
  const Operator u = full_propagator(s);
  const Operator rho = tensor_product(s.rho_i.op, s.rho_0.op);
  return u * rho * u.adjoint();
}

JointDistribution joint_from_state(const Scenario& s, const Operator& composite_state) {
  const auto nj = static_cast<Eigen::Index>(s.sys_povm.size());
  const auto nk = static_cast<Eigen::Index>(s.det_povm.size());
  JointDistribution out;
  out.p.resize(nk, nj);
  for (Eigen::Index j = 0; j < nj; ++j) {
    const auto& e = s.sys_povm.outcomes[j];
    // Tr_S[(E_j x I) rho]
    const Operator reduced = partial_trace_system(
        tensor_product(e.effect, identity(s.dim_d)) * composite_state, s.dim_s, s.dim_d);
    for (Eigen::Index k = 0; k < nk; ++k) {
      const auto& f = s.det_povm.outcomes[k];
      double v = e.weight * f.weight * trace_product(f.effect, reduced).real();
      out.min_raw = std::min(out.min_raw, v);
      if (v < 0.0 && v >= -Tolerances::algebraic) {
        v = 0.0;
        ++out.clamped;
      }
      out.p(k, j) = v;
    }
  }
  return out;
}

JointDistribution exact_joint(const Scenario& s) { return joint_from_state(s, evolved_state(s)); }

double exact_conditional_average(const Scenario& s, std::string_view f_label, double floor) {
  const auto j = static_cast<Eigen::Index>(s.sys_povm.index_of(f_label));
  const JointDistribution joint = exact_joint(s);
  return detector_values(s.det_povm).dot(joint.conditional(j, floor));
}

}  // namespace wmkubo
