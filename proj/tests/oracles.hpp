#pragma once

// Test-side reference computations, written without the library.

#include <array>
#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

inline double sech(double s) { return 1.0 / std::cosh(s); }

inline double alpha_c(double a, double b, double c) {
  return std::sqrt((c * c - 1) / (b * c * c - a));
}

inline double q(double a, double b, double c, double x) {
  double s = sech(0.5 * alpha_c(a, b, c) * x);
  return (c * c - 1) / c * s * s;
}

inline double qp(double a, double b, double c, double x) {
  double k = 0.5 * alpha_c(a, b, c);
  double s = sech(k * x);
  return -2.0 * k * (c * c - 1) / c * s * s * std::tanh(k * x);
}

inline double trapezoid(const std::function<double(double)>& f, double lo, double hi, int n) {
  double h = (hi - lo) / n, s = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) s += f(lo + i * h);
  return s * h;
}

// Composite Simpson, n even.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  double h = (hi - lo) / n, s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

// {int q, int q^2, int q'^2}; the trapezoid rule is spectrally accurate here.
inline std::array<double, 3> profile_integrals(double a, double b, double c) {
  double L = 80.0 / alpha_c(a, b, c);
  int n = 20000;
  return {trapezoid([&](double x) { return q(a, b, c, x); }, -L, L, n),
          trapezoid([&](double x) { return std::pow(q(a, b, c, x), 2); }, -L, L, n),
          trapezoid([&](double x) { return std::pow(qp(a, b, c, x), 2); }, -L, L, n)};
}

inline double energy(double a, double b, double c) {
  auto I = profile_integrals(a, b, c);
  return (1 + c * c) * I[1] + (a + b * c * c) * I[2];
}

inline double energy_dc(double a, double b, double c, double h = 1e-4) {
  return (energy(a, b, c + h) - energy(a, b, c - h)) / (2 * h);
}

// Polynomials of the curvature constant, term by term.
inline double n_poly(double a, double b, double c) {
  double c2 = c * c, c4 = c2 * c2, c6 = c4 * c2, c8 = c4 * c4;
  return 7 * a * a - b * a + (4 * a * a - 10 * b * a) * c2 + (3 * b * b + 4 * a * a - 7 * a * b) * c4 +
         6 * b * (b - 2 * a) * c6 + 6 * b * b * c8;
}

inline double d_poly(double a, double b, double c) {
  double c2 = c * c, c4 = c2 * c2, c6 = c4 * c2, c8 = c4 * c4;
  return 6 * a * a + (3 * a * a - 9 * a * b) * c2 + (6 * a * a + 2 * b * b - 2 * a * b) * c4 +
         (b * b - 19 * a * b) * c6 + 12 * b * b * c8;
}

// <zeta2, zeta1*> in closed form.
inline double G21(double a, double b, double c) {
  double c2 = c * c, c4 = c2 * c2;
  double num = a * (c2 - 1) + (b * c2 - a) + 2 * c4 * (2 * b * c2 - b - a);
  return 16.0 / (3 * c4) * (b * c4 - a) / (c2 - 1) * num / (b * c2 - a);
}

// Real-space kernel of the modulation prediction.
inline double box_heat_kernel(double y, double t, double l1, double l2, double k1) {
  double s = std::sqrt(4 * l2 * t);
  return (std::erf((y + l1 * t) / s) - std::erf((y - l1 * t) / s)) / (4 * k1);
}

inline std::complex<double> lambda_kp(double eta, double b_minus_a) {
  double g1 = 4 * std::sqrt(b_minus_a / 3);
  return std::complex<double>(0, eta / std::sqrt(3.0)) *
         std::sqrt(std::complex<double>(1, g1 * eta));
}

}  // namespace oracle
