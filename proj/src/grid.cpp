#include "blsw/grid.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/FFT>

#include "blsw/errors.hpp"

namespace blsw {

namespace {

Eigen::FFT<double>& fft() {
  thread_local Eigen::FFT<double> f;
  return f;
}

}  // namespace

Grid1D build_grid(const ModelParams& p, int n, std::optional<double> L_override) {
  if (n < 64 || n % 2 != 0)
    throw GridError("grid size must be even and >= 64, got n=" +
                    std::to_string(n));
  double L = L_override ? *L_override : tail_half_length(p);
  if (!(L > 0)) throw GridError("half-length must be positive");
  double ratio = weighted_tail_ratio(p, L);
  if (!(ratio <= 1e-10))
    throw GridError("weighted tail bound violated at L=" + std::to_string(L) +
                    ": q(L)e^{alpha L}/q(0)=" + std::to_string(ratio));
  Grid1D g;
  g.half_length = L;
  g.n = n;
  g.dz = 2.0 * L / n;
  g.alpha = p.alpha;
  g.nodes.resize(n);
  g.wavenumbers.resize(n);
  for (int j = 0; j < n; ++j) {
    g.nodes[j] = -L + j * g.dz;
    int k = j < n / 2 ? j : j - n;
    g.wavenumbers[j] = M_PI * k / L;
  }
  return g;
}

Eigen::VectorXcd apply_symbol(const Eigen::VectorXcd& values,
                              const Eigen::VectorXcd& field) {
  Eigen::VectorXcd hat, out;
  fft().fwd(hat, field);
  hat.array() *= values.array();
  fft().inv(out, hat);
  return out;
}

Eigen::VectorXcd unitary_fft(const Eigen::VectorXcd& f) {
  Eigen::VectorXcd out;
  fft().fwd(out, f);
  return out / std::sqrt(double(f.size()));
}

Eigen::VectorXcd unitary_ifft(const Eigen::VectorXcd& f) {
  Eigen::VectorXcd out;
  fft().inv(out, f);
  return out * std::sqrt(double(f.size()));
}

}  // namespace blsw
