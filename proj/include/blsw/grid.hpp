#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "blsw/params.hpp"

namespace blsw {

// Periodic collocation grid on [-L, L).
struct Grid1D {
  double half_length = 0;
  int n = 0;
  double dz = 0;
  double alpha = 0;             // weight used for conjugated multipliers
  Eigen::VectorXd nodes;        // z_j = -L + j dz
  Eigen::VectorXd wavenumbers;  // FFT order: 0, 1, ..., n/2 - 1, -n/2, ..., -1
};

Grid1D build_grid(const ModelParams& p, int n,
                  std::optional<double> L_override = std::nullopt);

// Symbol values m(xi_k + i shift) in FFT order. The Nyquist entry is the
// average of m(+-xi_N + i shift) so that real-coefficient symbols map real
// fields to real fields.
template <typename Symbol>
Eigen::VectorXcd symbol_values(const Grid1D& g, Symbol&& m, double shift) {
  Eigen::VectorXcd v(g.n);
  for (int k = 0; k < g.n; ++k)
    v[k] = m(std::complex<double>(g.wavenumbers[k], shift));
  int ny = g.n / 2;
  v[ny] = 0.5 * (v[ny] + m(std::complex<double>(-g.wavenumbers[ny], shift)));
  return v;
}

// F^{-1} diag(values) F field.
Eigen::VectorXcd apply_symbol(const Eigen::VectorXcd& values,
                              const Eigen::VectorXcd& field);

template <typename Symbol>
Eigen::VectorXcd multiplier_apply(const Grid1D& g, Symbol&& m,
                                  const Eigen::VectorXcd& field) {
  return apply_symbol(symbol_values(g, m, g.alpha), field);
}

template <typename Symbol>
Eigen::VectorXcd multiplier_apply(const Grid1D& g, Symbol&& m,
                                  const Eigen::VectorXcd& field,
                                  double shift) {
  return apply_symbol(symbol_values(g, m, shift), field);
}

// Unitary DFT and its inverse (used for frequency-weighted norms).
Eigen::VectorXcd unitary_fft(const Eigen::VectorXcd& f);
Eigen::VectorXcd unitary_ifft(const Eigen::VectorXcd& f);

// Samples f on the nodes, multiplied by exp(s z).
template <typename F>
Eigen::VectorXd sample(const Grid1D& g, F&& f, double s = 0.0) {
  Eigen::VectorXd v(g.n);
  for (int j = 0; j < g.n; ++j)
    v[j] = f(g.nodes[j]) * std::exp(s * g.nodes[j]);
  return v;
}

}  // namespace blsw
