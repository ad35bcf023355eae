#include "wmkubo/perturbation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace wmkubo {

namespace {

// Tr_S[(E x I) sigma] without forming E x I.
Operator reduce_with_system_effect(const Operator& e, const Operator& sigma, Eigen::Index ds,
                                   Eigen::Index dd) {
  Operator out = Operator::Zero(dd, dd);
  for (Eigen::Index a = 0; a < ds; ++a) {
    for (Eigen::Index b = 0; b < ds; ++b) {
      if (e(a, b) != Complex(0.0)) out += e(a, b) * sigma.block(b * dd, a * dd, dd, dd);
    }
  }
  return out;
}

// w_j w_k Tr[(E_j(-tau) x F_k(-tau)) sigma]
RealMatrix numerators(const Scenario& s, const InteractionPicture& ip, const Operator& sigma) {
  const auto nj = static_cast<Eigen::Index>(s.sys_povm.size());
  const auto nk = static_cast<Eigen::Index>(s.det_povm.size());
  RealMatrix q(nk, nj);
  for (Eigen::Index j = 0; j < nj; ++j) {
    const Operator reduced = reduce_with_system_effect(ip.sys_effects[j], sigma, s.dim_s, s.dim_d);
    const double wj = s.sys_povm.outcomes[j].weight;
    for (Eigen::Index k = 0; k < nk; ++k) {
      q(k, j) = wj * s.det_povm.outcomes[k].weight *
                trace_product(ip.det_effects[k], reduced).real();
    }
  }
  return q;
}

// V = sum_k dt g_k A(t_k) x X(t_k), without the coupling strength.
Operator interaction_integral(const InteractionPicture& ip) {
  const Eigen::Index dim = ip.dim_s() * ip.dim_d();
  Operator v = Operator::Zero(dim, dim);
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    v += (ip.dt * ip.g[ip.active[m]]) * tensor_product(ip.a_t[m], ip.x_t[m]);
  }
  return v;
}

Complex expect0(const InteractionPicture& ip, const Operator& op) {
  return trace_product(op, ip.rho_0);
}

std::vector<Complex> weak_values_first_order(const InteractionPicture& ip, const Operator& e,
                                             double denom) {
  std::vector<Complex> a_w(ip.n_t, Complex(0.0));
  const Operator rho_e = ip.rho_i * e;
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    const std::size_t k = ip.active[m];
    // Tr[E A rho] = Tr[A (rho E)]
    a_w[k] = ip.lambda * ip.g[k] * trace_product(ip.a_t[m], rho_e) / denom;
  }
  return a_w;
}

double weak_value_denominator(const InteractionPicture& ip, const PovmOutcome& outcome,
                              Eigen::Index j, double floor) {
  const double denom = trace_product(ip.sys_effects[j], ip.rho_i).real();
  if (!(std::abs(denom) > floor)) {
    std::ostringstream os;
    os << "weak value denominator Tr_S[E_f(-tau) rho_i] = " << denom << " for outcome '"
       << outcome.label << "' is below the floor " << floor;
    throw PostselectionFloorError(os.str(), denom, floor);
  }
  return denom;
}

// Linear-response readout for a given force amplitude a_w(t).
double linear_response(const InteractionPicture& ip, const std::vector<Complex>& a_w) {
  const Eigen::Index dd = ip.dim_d();
  Complex total = expect0(ip, ip.r_tau);
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    const std::size_t k = ip.active[m];
    const Complex x_mean = expect0(ip, ip.x_t[m]);
    const Operator w = a_w[k] * (ip.x_t[m] - x_mean * identity(dd));
    const Operator w_dag = w.adjoint();
    const Complex response = expect0(ip, ip.r_tau * w) - expect0(ip, w_dag * ip.r_tau);
    total += Complex(0.0, 1.0) * ip.dt * response;
  }
  return total.real();
}

// Coefficients c0 + c1 x + c2 x^2 of the Taylor expansion of
// (a0 + a1 x + a2 x^2) / (b0 + b1 x + b2 x^2), evaluated at x.
double taylor_ratio(double a0, double a1, double a2, double b0, double b1, double b2, double x) {
  const double c0 = a0 / b0;
  const double c1 = (a1 - c0 * b1) / b0;
  const double c2 = (a2 - c1 * b1 - c0 * b2) / b0;
  return c0 + x * (c1 + x * c2);
}

}  // namespace

InteractionPicture interaction_picture(const Scenario& s) {
  require_valid(s);
  InteractionPicture ip;
  const auto& c = s.coupling;
  ip.n_t = c.size();
  ip.dt = c.dt();
  ip.lambda = c.lambda;
  ip.g = c.samples;
  ip.rho_i = s.rho_i.op;
  ip.rho_0 = s.rho_0.op;

  const SpectralPropagator us(s.h_s);
  const SpectralPropagator ud(s.h_d);
  for (std::size_t k = 0; k < ip.n_t; ++k) {
    if (ip.g[k] == 0.0) continue;
    ip.active.push_back(k);
    const double t = c.time(k);
    const Operator u_s = us.at(t);
    const Operator u_d = ud.at(t);
    ip.a_t.push_back(u_s.adjoint() * s.a_obs * u_s);
    ip.x_t.push_back(u_d.adjoint() * s.x_obs * u_d);
  }

  const Operator us_tau = us.at(c.tau);
  const Operator ud_tau = ud.at(c.tau);
  for (const auto& o : s.sys_povm.outcomes) {
    ip.sys_effects.push_back(us_tau.adjoint() * o.effect * us_tau);
  }
  ip.r_tau = Operator::Zero(s.dim_d, s.dim_d);
  for (const auto& o : s.det_povm.outcomes) {
    ip.det_effects.push_back(ud_tau.adjoint() * o.effect * ud_tau);
    ip.r_tau += (o.weight * o.value) * ip.det_effects.back();
  }
  return ip;
}

WeakValueTrace weak_value_trace(const InteractionPicture& ip, const PovmOutcome& outcome,
                                Eigen::Index j, double floor) {
  WeakValueTrace out;
  const Operator& e = ip.sys_effects[j];
  out.denom = weak_value_denominator(ip, outcome, j, floor);
  out.a_w = weak_values_first_order(ip, e, out.denom);

  const auto n = static_cast<Eigen::Index>(ip.n_t);
  out.b_w = Eigen::MatrixXcd::Zero(n, n);
  // Tr[E A(t) rho A(t')] = Tr[(E A(t)) (rho A(t'))]
  std::vector<Operator> left, right;
  for (const auto& a : ip.a_t) {
    left.push_back(e * a);
    right.push_back(ip.rho_i * a);
  }
  const double scale = ip.lambda * ip.lambda / out.denom;
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    const std::size_t k = ip.active[m];
    for (std::size_t l = 0; l < ip.active.size(); ++l) {
      const std::size_t kk = ip.active[l];
      out.b_w(k, kk) = scale * ip.g[k] * ip.g[kk] * trace_product(left[m], right[l]);
    }
  }
  return out;
}

WeakValueTrace weak_value_trace(const Scenario& s, std::string_view f_label, double floor) {
  const auto j = static_cast<Eigen::Index>(s.sys_povm.index_of(f_label));
  const InteractionPicture ip = interaction_picture(s);
  return weak_value_trace(ip, s.sys_povm.outcomes[j], j, floor);
}

RealVector PerturbativeDistribution::conditional(Eigen::Index j, double floor) const {
  const double column = q.col(j).sum();
  if (!(column / n_lambda > floor)) {
    std::ostringstream os;
    os << "perturbative postselection probability " << column / n_lambda
       << " is below the floor " << floor;
    throw PostselectionFloorError(os.str(), column / n_lambda, floor);
  }
  return q.col(j) / column;
}

PerturbativeDistribution perturbative_joint(const Scenario& s) {
  const InteractionPicture ip = interaction_picture(s);
  const Eigen::Index dim = s.dim_s * s.dim_d;
  const Operator m = identity(dim) + Complex(0.0, s.lambda()) * interaction_integral(ip);
  const Operator rho = tensor_product(ip.rho_i, ip.rho_0);
  const Operator sigma = m * rho * m.adjoint();
  PerturbativeDistribution out;
  out.q = numerators(s, ip, sigma);
  out.n_lambda = out.q.sum();
  return out;
}

PerturbativeDistribution perturbative_joint_weakvalue_form(const Scenario& s, double floor) {
  const InteractionPicture ip = interaction_picture(s);
  const Eigen::Index dd = s.dim_d;
  const auto nj = static_cast<Eigen::Index>(s.sys_povm.size());
  const auto nk = static_cast<Eigen::Index>(s.det_povm.size());
  const double dt = ip.dt;

  PerturbativeDistribution out;
  out.q.resize(nk, nj);
  for (Eigen::Index j = 0; j < nj; ++j) {
    const auto& outcome = s.sys_povm.outcomes[j];
    const WeakValueTrace wv = weak_value_trace(ip, outcome, j, floor);

    // first = int dt A_w(t) X(t) rho_0
    Operator first = Operator::Zero(dd, dd);
    for (std::size_t m = 0; m < ip.active.size(); ++m) {
      first += (dt * wv.a_w[ip.active[m]]) * (ip.x_t[m] * ip.rho_0);
    }
    // second = int dt dt' B_w(t, t') X(t) rho_0 X(t')
    Operator second = Operator::Zero(dd, dd);
    for (std::size_t m = 0; m < ip.active.size(); ++m) {
      Operator z = Operator::Zero(dd, dd);
      for (std::size_t l = 0; l < ip.active.size(); ++l) {
        z += (dt * dt * wv.b_w(ip.active[m], ip.active[l])) * ip.x_t[l];
      }
      second += ip.x_t[m] * ip.rho_0 * z;
    }

    for (Eigen::Index k = 0; k < nk; ++k) {
      const Operator& f = ip.det_effects[k];
      const double zeroth = trace_product(f, ip.rho_0).real();
      const Complex linear = Complex(0.0, 1.0) * trace_product(f, first);
      const double quadratic = trace_product(f, second).real();
      out.q(k, j) = outcome.weight * s.det_povm.outcomes[k].weight * wv.denom *
                    (zeroth + 2.0 * linear.real() + quadratic);
    }
  }
  out.n_lambda = out.q.sum();
  return out;
}

double postselection_probability(const Scenario& s, std::string_view f_label, double floor) {
  const auto j = static_cast<Eigen::Index>(s.sys_povm.index_of(f_label));
  const InteractionPicture ip = interaction_picture(s);
  const auto& outcome = s.sys_povm.outcomes[j];
  const WeakValueTrace wv = weak_value_trace(ip, outcome, j, floor);
  const double dt = ip.dt;

  double bracket = 1.0;
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    const double x_mean = expect0(ip, ip.x_t[m]).real();
    bracket -= 2.0 * dt * x_mean * wv.a_w[ip.active[m]].imag();
  }
  Complex dbl(0.0);
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    for (std::size_t l = 0; l < ip.active.size(); ++l) {
      // <X(t') X(t)>_0 B_w(t, t')
      dbl += dt * dt * expect0(ip, ip.x_t[l] * ip.x_t[m]) * wv.b_w(ip.active[m], ip.active[l]);
    }
  }
  bracket += dbl.real();
  return outcome.weight * wv.denom * bracket / perturbative_joint(s).n_lambda;
}

MainFormulaResult conditional_average_main(const Scenario& s, std::string_view f_label,
                                           double floor) {
  const auto j = static_cast<Eigen::Index>(s.sys_povm.index_of(f_label));
  const InteractionPicture ip = interaction_picture(s);
  const WeakValueTrace wv = weak_value_trace(ip, s.sys_povm.outcomes[j], j, floor);
  const double dt = ip.dt;
  const Operator& r = ip.r_tau;
  const Complex i(0.0, 1.0);

  Complex num = expect0(ip, r);
  Complex first_den(0.0);
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    const Complex aw = wv.a_w[ip.active[m]];
    const Operator& x = ip.x_t[m];
    const Complex rx = expect0(ip, r * x);
    const Complex xr = expect0(ip, x * r);
    // i A' <[R, X]> - A'' <{R, X}>
    num += dt * (i * aw.real() * (rx - xr) - aw.imag() * (rx + xr));
    first_den += -2.0 * dt * expect0(ip, x) * aw.imag();
  }

  Complex second_num(0.0);
  Complex second_den(0.0);
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    const Operator rx_rho = r * ip.x_t[m] * ip.rho_0;
    const Operator x_rho = ip.x_t[m] * ip.rho_0;
    for (std::size_t l = 0; l < ip.active.size(); ++l) {
      const Complex b = dt * dt * wv.b_w(ip.active[m], ip.active[l]);
      // <X(t') R X(t)>_0 and <X(t') X(t)>_0 with t = t_m, t' = t_l
      second_num += b * trace_product(ip.x_t[l], rx_rho);
      second_den += b * trace_product(ip.x_t[l], x_rho);
    }
  }
  num += second_num;
  const Complex den = 1.0 + first_den + second_den;

  MainFormulaResult out;
  out.numerator = num.real();
  out.denominator = den.real();
  out.first_order = first_den.real();
  out.second_order = second_den.real();
  out.imag_residue = std::max(std::abs(num.imag()), std::abs(den.imag()));
  if (!(out.denominator > 0.0)) {
    std::ostringstream os;
    os << "second-order denominator " << out.denominator << " is not positive for outcome '"
       << f_label << "'";
    throw RegimeBreakdownError(os.str());
  }
  out.value = out.numerator / out.denominator;
  out.nonperturbative = std::abs(out.second_order) > kNonperturbativeThreshold ||
                        std::abs(second_num.real()) > kNonperturbativeThreshold;
  return out;
}

Operator force_term(const Scenario& s, std::string_view f_label, std::size_t k, double floor) {
  if (k >= s.n_t()) throw std::out_of_range("force_term: time index outside the grid");
  const auto j = static_cast<Eigen::Index>(s.sys_povm.index_of(f_label));
  const InteractionPicture ip = interaction_picture(s);
  const double denom = weak_value_denominator(ip, s.sys_povm.outcomes[j], j, floor);
  const std::vector<Complex> a_w = weak_values_first_order(ip, ip.sys_effects[j], denom);

  // X(t_k) is needed even where g vanishes.
  const Operator u_d = hermitian_exp(s.h_d, s.coupling.time(k));
  const Operator x = u_d.adjoint() * s.x_obs * u_d;
  const Complex x_mean = expect0(ip, x);
  return a_w[k] * (x - x_mean * identity(s.dim_d));
}

double modified_kubo(const Scenario& s, std::string_view f_label, double floor) {
  const auto j = static_cast<Eigen::Index>(s.sys_povm.index_of(f_label));
  const InteractionPicture ip = interaction_picture(s);
  const double denom = weak_value_denominator(ip, s.sys_povm.outcomes[j], j, floor);
  return linear_response(ip, weak_values_first_order(ip, ip.sys_effects[j], denom));
}

double ordinary_kubo(const Scenario& s) {
  const InteractionPicture ip = interaction_picture(s);
  std::vector<Complex> a(ip.n_t, Complex(0.0));
  for (std::size_t m = 0; m < ip.active.size(); ++m) {
    const std::size_t k = ip.active[m];
    a[k] = ip.lambda * ip.g[k] * trace_product(ip.a_t[m], ip.rho_i).real();
  }
  return linear_response(ip, a);
}

TaylorDistribution naive_taylor_probability(const Scenario& s) {
  const InteractionPicture ip = interaction_picture(s);
  const Operator v = interaction_integral(ip);
  const Operator rho = tensor_product(ip.rho_i, ip.rho_0);
  const Complex i(0.0, 1.0);
  // M rho M^dagger = rho + lambda i[V, rho] + lambda^2 V rho V
  const RealMatrix q0 = numerators(s, ip, rho);
  const RealMatrix q1 = numerators(s, ip, i * (v * rho - rho * v));
  const RealMatrix q2 = numerators(s, ip, v * rho * v);
  const double lam = s.lambda();

  TaylorDistribution out;
  out.joint.resize(q0.rows(), q0.cols());
  out.conditional.resize(q0.rows(), q0.cols());
  const double n0 = q0.sum();
  const double n1 = q1.sum();
  const double n2 = q2.sum();
  for (Eigen::Index j = 0; j < q0.cols(); ++j) {
    const double c0 = q0.col(j).sum();
    const double c1 = q1.col(j).sum();
    const double c2 = q2.col(j).sum();
    for (Eigen::Index k = 0; k < q0.rows(); ++k) {
      out.joint(k, j) = taylor_ratio(q0(k, j), q1(k, j), q2(k, j), n0, n1, n2, lam);
      out.conditional(k, j) = c0 > Tolerances::denominator_floor
                                  ? taylor_ratio(q0(k, j), q1(k, j), q2(k, j), c0, c1, c2, lam)
                                  : std::numeric_limits<double>::quiet_NaN();
    }
  }
  out.min_joint = out.joint.minCoeff();
  out.min_conditional = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < out.conditional.cols(); ++j) {
    if (std::isnan(out.conditional(0, j))) continue;
    out.min_conditional = std::min(out.min_conditional, out.conditional.col(j).minCoeff());
  }
  out.negative = out.min_joint < -Tolerances::algebraic ||
                 out.min_conditional < -Tolerances::algebraic;
  return out;
}

}  // namespace wmkubo
