#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "blsw/errors.hpp"
#include "blsw/params.hpp"

namespace blsw {

// sgn(xi) sqrt((xi + i alpha)^2 + eta^2); at xi = 0 the root with Im >= 0.
template <typename Real>
std::complex<Real> mu(Real xi, Real alpha, Real eta) {
  using C = std::complex<Real>;
  if (xi == Real(0)) {
    Real s = eta * eta - alpha * alpha;
    return s >= Real(0) ? C(std::sqrt(s), 0) : C(0, std::sqrt(-s));
  }
  C w(xi, alpha);
  C root = std::sqrt(w * w + eta * eta);
  return xi > Real(0) ? root : -root;
}

// S^2 = (1 + a k2) / (1 + b k2) with k2 = (xi + i alpha)^2 + eta^2.
template <typename Real>
std::complex<Real> big_S(Real xi, Real alpha, Real eta, Real a, Real b) {
  using C = std::complex<Real>;
  if (!(Real(1) - b * alpha * alpha > Real(0)))
    throw DomainError("big_S needs 1 - b alpha^2 > 0");
  C w(xi, alpha);
  C k2 = w * w + eta * eta;
  // a/b + (1 - a/b)/(1 + b k2) keeps the sign of Im S exact for large k2
  return std::sqrt(a / b + (Real(1) - a / b) / (Real(1) + b * k2));
}

inline std::complex<double> big_S(double xi, double alpha, double eta,
                                  const ModelParams& p) {
  return big_S<double>(xi, alpha, eta, p.a, p.b);
}

// (lambda_plus, lambda_minus) at xi + i alpha.
template <typename Real>
std::pair<std::complex<Real>, std::complex<Real>> lambda_pm(
    Real xi, Real eta, Real alpha, Real a, Real b, Real c) {
  using C = std::complex<Real>;
  const C I(0, 1);
  C w(xi, alpha);
  C ms = mu(xi, alpha, eta) * big_S(xi, alpha, eta, a, b);
  return {I * c * w + I * ms, I * c * w - I * ms};
}

inline std::pair<std::complex<double>, std::complex<double>> lambda_pm(
    double xi, double eta, const ModelParams& p) {
  return lambda_pm<double>(xi, eta, p.alpha, p.a, p.b, p.c);
}

// (i/2){(b-a) w^3 + w - eta^2 / w} at w = xi + i alpha_hat.
template <typename Real>
std::complex<Real> kp_free_symbol(Real xi, Real alpha_hat, Real eta,
                                  Real b_minus_a) {
  using C = std::complex<Real>;
  C w(xi, alpha_hat);
  return C(0, Real(0.5)) * (b_minus_a * w * w * w + w - eta * eta / w);
}

inline std::complex<double> kp_free_symbol(double xi, double alpha_hat,
                                           double eta, const ModelParams& p) {
  return kp_free_symbol<double>(xi, alpha_hat, eta, p.b - p.a);
}

// (alpha_hat / 2)(1 - (b - a) alpha_hat^2).
inline double kp_beta0(double alpha_hat, const ModelParams& p) {
  return 0.5 * alpha_hat * (1.0 - (p.b - p.a) * alpha_hat * alpha_hat);
}

struct SymbolPoint {
  double xi = 0, alpha = 0, eta = 0;
  std::complex<double> mu, S, lam_plus, lam_minus, A, B;
};

SymbolPoint symbol_point(double xi, double eta, const ModelParams& p);

struct BoundCheck {
  std::string name;
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  // max over samples of (lhs - rhs), normalized; <= 0 means satisfied
  double worst_margin = -1e300;
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  double delta = 0, K = 0;
  double high_constant = 0;  // calibrated C of the high-frequency bound
  double beta_hat = 0;
  // sup 1/|lambda - lambda_pm| over Re lambda = -beta_hat eps^3
  double sup_inv_plus = 0, sup_inv_minus = 0;
  // the same sups scaled by eps and eps^3
  double C_plus = 0, C_minus = 0;
  // sup 1/|lambda_minus| (lambda = 0)
  double sup_inv_minus_at_zero = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
  const BoundCheck* find(const std::string& name) const;
};

struct SymbolCheckOptions {
  double delta = -1;  // <= 0: eps^(1/20)
  double K = -1;      // <= 0: delta^-3
  double beta_hat_fraction = 1.0 / 16.0;
  double slack = 1e-12;  // relative rounding allowance
};

BoundReport verify_symbol_bounds(const ModelParams& p, std::int64_t n_samples,
                                 std::uint64_t rng_seed,
                                 const SymbolCheckOptions& opt = {});

}  // namespace blsw
