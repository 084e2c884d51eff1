#include "blsw/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "blsw/errors.hpp"

namespace blsw {

namespace {

// 1 - tanh(s) and 1 + tanh(s) without cancellation.
double one_minus_tanh(double s) { return 2.0 / (1.0 + std::exp(2.0 * s)); }
double one_plus_tanh(double s) { return 2.0 / (1.0 + std::exp(-2.0 * s)); }

double sech(double s) {
  double e = std::exp(-std::abs(s));
  return 2.0 * e / (1.0 + e * e);
}

}  // namespace

ModelParams make_params(double a, double b, double c, double alpha_fraction) {
  if (!(a > 0.0) || !(b > a))
    throw DomainError("need 0 < a < b, got a=" + std::to_string(a) +
                      " b=" + std::to_string(b));
  if (!(c > 1.0)) throw DomainError("need c > 1, got c=" + std::to_string(c));
  if (!(alpha_fraction > 0.0) || !(alpha_fraction < 1.0))
    throw DomainError("need alpha_fraction in (0,1), got " +
                      std::to_string(alpha_fraction));
  ModelParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  p.eps = std::sqrt((c - 1.0) * (c + 1.0));
  p.alpha_c = std::sqrt((c * c - 1.0) / (b * c * c - a));
  p.alpha_c_prime = std::sqrt((c - 1.0) / (b * c - a));
  p.alpha_hat0 = 1.0 / std::sqrt(b - a);
  p.alpha_fraction = alpha_fraction;
  p.alpha = alpha_fraction * p.alpha_c_prime;
  return p;
}

ModelParams with_alpha(ModelParams p, double alpha) {
  if (!(alpha > 0.0) || !(alpha < p.alpha_c))
    throw DomainError("need 0 < alpha < alpha_c, got " + std::to_string(alpha));
  p.alpha = alpha;
  p.alpha_fraction = alpha / p.alpha_c_prime;
  return p;
}

double alpha_c_dc(const ModelParams& p) {
  double d = p.b * p.c * p.c - p.a;
  return p.c * (p.b - p.a) / (p.alpha_c * d * d);
}

ProfileBundle eval_profile(const ModelParams& p, double x) {
  const double c = p.c, ac = p.alpha_c, dac = alpha_c_dc(p);
  const double Q = (c * c - 1.0) / c;
  const double dQ = 1.0 + 1.0 / (c * c);
  const double P = 2.0 * Q / ac;  // amplitude of phi
  const double dP = 2.0 * dQ / ac - 2.0 * Q * dac / (ac * ac);
  const double s = 0.5 * ac * x;
  const double th = std::tanh(s);
  const double se = sech(s);
  const double s2 = se * se;
  // derivative of s2 with respect to c
  const double ds2 = -2.0 * s2 * th * 0.5 * x * dac;

  ProfileBundle out;
  out.phi = P * th;
  out.q = Q * s2;
  out.qp = -Q * ac * s2 * th;
  out.qpp = 0.5 * Q * ac * ac * (2.0 * s2 * th * th - s2 * s2);
  out.r = -c * out.q;
  out.rp = -c * out.qp;
  out.dq_dc = dQ * s2 + Q * ds2;
  out.dr_dc = -out.q - c * out.dq_dc;
  out.tail_int = dP * one_minus_tanh(s) - P * s2 * 0.5 * x * dac;
  out.head_int = dP * one_plus_tanh(s) + P * s2 * 0.5 * x * dac;
  return out;
}

ProfileIntegrals closed_form_integrals(const ModelParams& p) {
  const double c = p.c, ac = p.alpha_c, e2 = c * c - 1.0;
  return {4.0 * e2 / (c * ac), 8.0 * e2 * e2 / (3.0 * ac * c * c),
          8.0 * ac * e2 * e2 / (15.0 * c * c)};
}

ProfileIntegrals quadrature_integrals(const ModelParams& p) {
  using boost::math::quadrature::gauss_kronrod;
  const double L = 40.0 / p.alpha_c;
  auto integ = [&](auto f) {
    return gauss_kronrod<double, 31>::integrate(f, -L, L, 20, 1e-14);
  };
  ProfileIntegrals out;
  out.I1 = integ([&](double x) { return eval_profile(p, x).q; });
  out.I2 = integ([&](double x) {
    double q = eval_profile(p, x).q;
    return q * q;
  });
  out.I3 = integ([&](double x) {
    double qp = eval_profile(p, x).qp;
    return qp * qp;
  });
  return out;
}

Energy energy_and_derivative(const ModelParams& p) {
  const double a = p.a, b = p.b, c = p.c;
  const double ac = p.alpha_c, dac = alpha_c_dc(p);
  const double e2 = c * c - 1.0;
  auto I = closed_form_integrals(p);
  // I2 = (8/3) e2^2 / (ac c^2), I3 = (8/15) ac e2^2 / c^2
  const double dlog_e2sq_c2 = 4.0 * c / e2 - 2.0 / c;
  const double dI2 = I.I2 * (dlog_e2sq_c2 - dac / ac);
  const double dI3 = I.I3 * (dlog_e2sq_c2 + dac / ac);
  Energy out;
  out.E = (1.0 + c * c) * I.I2 + (a + b * c * c) * I.I3;
  out.dE_dc = 2.0 * c * I.I2 + (1.0 + c * c) * dI2 + 2.0 * b * c * I.I3 +
              (a + b * c * c) * dI3;
  return out;
}

double tail_half_length(const ModelParams& p) {
  return std::min(40.0 / (p.alpha_c - p.alpha), 400.0);
}

double weighted_tail_ratio(const ModelParams& p, double L) {
  double s = 0.5 * p.alpha_c * L;
  double se = sech(s);
  return se * se * std::exp(p.alpha * L);
}

}  // namespace blsw
