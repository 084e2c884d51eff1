#include "blsw/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "blsw/errors.hpp"
#include "parallel.hpp"

namespace blsw {

Propagator::Propagator(const OperatorMatrix& M, double max_condition)
    : M_(M.entries) {
  try {
    DenseEigen d = dense_eigen(M);
    cond_ = d.condition;
    if (std::isfinite(cond_) && cond_ <= max_condition) {
      values_ = d.values;
      V_ = std::move(d.right);
      W_ = std::move(d.left);
      eig_ = true;
    }
  } catch (const EigFailure&) {
    cond_ = std::numeric_limits<double>::infinity();
  }
}

StatePair Propagator::apply(const StatePair& s0, double t) const {
  if (t == 0.0) return s0;
  StatePair out;
  if (eig_) {
    Eigen::VectorXcd a = W_.adjoint() * s0;
    for (Eigen::Index k = 0; k < a.size(); ++k) a[k] *= std::exp(values_[k] * t);
    out = V_ * a;
  } else {
    Eigen::MatrixXd E = (M_ * t).exp();
    out = E.cast<cd>() * s0;
  }
  if (!out.allFinite()) throw PropagationError("non-finite state at t=" + std::to_string(t));
  return out;
}

std::vector<StatePair> evolve_mode(const OperatorMatrix& M, const StatePair& state0,
                                   const std::vector<double>& times) {
  for (size_t i = 0; i < times.size(); ++i)
    if (!(times[i] >= 0) || (i > 0 && times[i] < times[i - 1]))
      throw DomainError("times must be sorted and nonnegative");
  Propagator P(M);
  std::vector<StatePair> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(P.apply(state0, t));
  return out;
}

Eigen::Vector2cd project_resonant(const ResonantBasis& rb, const Grid1D& g,
                                  const StatePair& state) {
  return {pairing(g, state, rb.g1_star), pairing(g, state, rb.g2_star)};
}

Eigen::Vector2cd project_resonant(const ModelParams& p, const Grid1D& g, double eta,
                                  const StatePair& state) {
  return project_resonant(resonant_basis(p, g, eta), g, state);
}

StatePair resonant_part(const ResonantBasis& rb, const Grid1D& g, const StatePair& state) {
  Eigen::Vector2cd c = project_resonant(rb, g, state);
  return c[0] * rb.g1 + c[1] * rb.g2;
}

StatePair project_out_resonant(const ResonantBasis& rb, const Grid1D& g,
                               const StatePair& state) {
  StatePair s = state - resonant_part(rb, g, state);
  // second pass removes the rounding left by the first
  return s - resonant_part(rb, g, s);
}

ModeCoefficients track_modes(const ModelParams& p, const Grid1D& g, double eta,
                             const StatePair& state0, const std::vector<double>& times) {
  const ClosedFormConstants k0 = closed_form_constants(p);
  OperatorMatrix M = assemble_L(p, g, eta);
  ResonantBasis rb =
      resonant_basis(p, g, M, cd(-k0.lambda2_0 * eta * eta, k0.lambda1_0 * eta));
  Propagator P(M);
  ModeCoefficients mc;
  mc.eta = eta;
  mc.lambda = rb.lambda;
  mc.kappa = rb.kappa;
  mc.A = rb.A();
  mc.times = times;
  for (double t : times) {
    Eigen::Vector2cd c = project_resonant(rb, g, P.apply(state0, t));
    mc.c.push_back(c);
    mc.e.push_back(std::norm(rb.kappa * c[0]) + std::norm(c[1]));
  }
  return mc;
}

double modulation_multiplier(double eta, double t, double lambda1, double lambda2,
                             double kappa1) {
  if (eta == 0.0) return lambda1 * t / kappa1;
  return std::exp(-lambda2 * eta * eta * t) * std::sin(lambda1 * eta * t) /
         (kappa1 * eta);
}

double modulation_kernel(double y, double t, double lambda1, double lambda2,
                         double kappa1) {
  const double a = lambda1 * t, s = std::sqrt(4.0 * lambda2 * t);
  return 0.25 / kappa1 * (std::erf((y + a) / s) - std::erf((y - a) / s));
}

YGrid build_ygrid(double half_length, int m) {
  if (m < 2 || m % 2) throw GridError("y grid needs an even number of points");
  if (!(half_length > 0)) throw GridError("y half-length must be positive");
  YGrid y;
  y.half_length = half_length;
  y.m = m;
  y.dy = 2.0 * half_length / m;
  y.nodes.resize(m);
  y.wavenumbers.resize(m);
  for (int j = 0; j < m; ++j) {
    y.nodes[j] = -half_length + j * y.dy;
    int k = j < m / 2 ? j : j - m;
    y.wavenumbers[j] = M_PI * k / half_length;
  }
  return y;
}

Eigen::VectorXd modulation_prediction(const YGrid& yg, const Eigen::VectorXd& f,
                                      double t, double lambda1, double lambda2,
                                      double kappa1) {
  if (!(t > 0)) throw DomainError("modulation prediction needs t > 0");
  Eigen::FFT<double> fft;
  Eigen::VectorXcd fc = f.cast<cd>(), F;
  fft.fwd(F, fc);
  for (int k = 0; k < yg.m; ++k)
    F[k] *= modulation_multiplier(yg.wavenumbers[k], t, lambda1, lambda2, kappa1);
  Eigen::VectorXcd out;
  fft.inv(out, F);
  return out.real();
}

Eigen::VectorXd modulation_prediction(const ModelParams& p, const YGrid& yg,
                                      const Eigen::VectorXd& f, double t) {
  const ClosedFormConstants k = closed_form_constants(p);
  return modulation_prediction(yg, f, t, k.lambda1_0, k.lambda2_0, k.kappa1);
}

StatePair noise_state(const ModelParams& p, const Grid1D& zg, unsigned seed) {
  const int n = zg.n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  // band-limited noise under a bump centered on the wave
  const double width = 4.0 / p.alpha_c;
  Eigen::VectorXcd u(n), v(n);
  for (int k = 0; k < n; ++k) {
    double xi = zg.wavenumbers[k];
    double damp = std::exp(-0.5 * xi * xi * width * width / 16.0);
    u[k] = cd(nd(rng), nd(rng)) * damp;
    v[k] = cd(nd(rng), nd(rng)) * damp;
  }
  Eigen::VectorXd env = sample(zg, [&](double z) { return std::exp(-0.5 * z * z / (width * width)); });
  StatePair s(2 * n);
  s.head(n) = unitary_ifft(u).real().cwiseProduct(env).cast<cd>();
  s.tail(n) = unitary_ifft(v).real().cwiseProduct(env).cast<cd>();
  return s;
}

Field2D make_field(const ModelParams& p, const Grid1D& zg, const YGrid& yg,
                   const std::string& preset, unsigned seed, double y_width) {
  const int n = zg.n, m = yg.m;
  Field2D F;
  F.z_grid = zg;
  F.y_grid = yg;
  F.phi = Eigen::MatrixXcd::Zero(n, m);
  F.psi = Eigen::MatrixXcd::Zero(n, m);
  Eigen::VectorXd h(m);
  for (int j = 0; j < m; ++j)
    h[j] = std::exp(-0.5 * yg.nodes[j] * yg.nodes[j] / (y_width * y_width));

  if (preset == "gaussian-phase-bump") {
    Eigen::VectorXd q = sample(zg, [&](double z) { return eval_profile(p, z).q; }, zg.alpha);
    F.phi = (q * h.transpose()).cast<cd>();
    F.psi = F.phi;
  } else if (preset == "kernel-mode") {
    ZetaQuadruple zq = zeta_quadruple(p, zg);
    for (int j = 0; j < m; ++j) {
      F.phi.col(j) = zq.zeta1.head(n);
      F.psi.col(j) = zq.zeta1.tail(n);
    }
  } else if (preset == "projected-noise") {
    StatePair s = noise_state(p, zg, seed);
    ResonantBasis rb = resonant_basis(p, zg, 0.0);
    s = project_out_resonant(rb, zg, s);
    s /= x_norm(zg, 0.0, s);
    for (int j = 0; j < m; ++j) {
      F.phi.col(j) = s.head(n) * h[j];
      F.psi.col(j) = s.tail(n) * h[j];
    }
  } else {
    throw ConfigError("unknown initial-data preset '" + preset + "'");
  }
  return F;
}

Eigen::VectorXd modulation_source(const ModelParams& p, const Field2D& field) {
  const Grid1D& g = field.z_grid;
  const int n = g.n;
  ZetaQuadruple zq = zeta_quadruple(p, g);
  Eigen::VectorXd f(field.y_grid.m);
  StatePair s(2 * n);
  for (int j = 0; j < field.y_grid.m; ++j) {
    s << field.phi.col(j), field.psi.col(j);
    f[j] = pairing(g, s, zq.zeta2_star).real();
  }
  return f;
}

std::vector<double> geometric_times(double t0, double t1, int count) {
  if (!(t0 > 0) || !(t1 >= t0) || count < 1)
    throw DomainError("geometric times need 0 < t0 <= t1 and count >= 1");
  std::vector<double> t(count);
  double r = count > 1 ? std::pow(t1 / t0, 1.0 / (count - 1)) : 1.0;
  for (int k = 0; k < count; ++k) t[k] = t0 * std::pow(r, k);
  t.back() = t1;
  return t;
}

EvolutionRecord evolve_field(const ModelParams& p, const Field2D& field0,
                             const std::vector<double>& times,
                             const EvolveOptions& opt) {
  const Grid1D& g = field0.z_grid;
  const YGrid& yg = field0.y_grid;
  const int n = g.n, m = yg.m, half = m / 2;
  for (size_t i = 0; i < times.size(); ++i)
    if (!(times[i] >= 0) || (i > 0 && times[i] < times[i - 1]))
      throw DomainError("times must be sorted and nonnegative");

  // y transform, one z row at a time
  Eigen::FFT<double> fft;
  Eigen::MatrixXcd phat(n, m), shat(n, m);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXcd row = field0.phi.row(i).transpose(), out;
    fft.fwd(out, row);
    phat.row(i) = out.transpose();
    row = field0.psi.row(i).transpose();
    fft.fwd(out, row);
    shat.row(i) = out.transpose();
  }
  // resolution check on the initial y spectrum
  double top = std::max(phat.cwiseAbs().maxCoeff(), shat.cwiseAbs().maxCoeff());
  double nyq = std::max(phat.col(half).cwiseAbs().maxCoeff(), shat.col(half).cwiseAbs().maxCoeff());
  if (top > 0 && nyq > 1e-10 * top)
    throw GridError("initial data not resolved in y (Nyquist ratio " + std::to_string(nyq / top) + ")");

  // real data: blocks k and m - k are conjugate
  const int T = static_cast<int>(times.size());
  std::vector<std::vector<StatePair>> blocks(half + 1);
  detail::parallel_for(half + 1, opt.threads, [&](int k) {
    StatePair s0(2 * n);
    s0 << phat.col(k), shat.col(k);
    blocks[k].resize(T);
    if (s0.squaredNorm() == 0.0) {
      for (int i = 0; i < T; ++i) blocks[k][i] = s0;
      return;
    }
    OperatorMatrix M = assemble_L(p, g, std::abs(yg.wavenumbers[k]));
    Propagator P(M);
    for (int i = 0; i < T; ++i) blocks[k][i] = P.apply(s0, times[i]);
  });

  const ClosedFormConstants k0 = closed_form_constants(p);
  Eigen::VectorXd f = modulation_source(p, field0);
  Eigen::VectorXd qp = sample(g, [&](double z) { return eval_profile(p, z).qp; }, g.alpha);
  Eigen::VectorXd rp = sample(g, [&](double z) { return eval_profile(p, z).rp; }, g.alpha);
  Eigen::VectorXcd Dsym = symbol_values(g, [](cd w) { return cd(0, 1) * w; }, g.alpha);

  EvolutionRecord rec;
  rec.times = times;
  rec.fit_t0 = opt.fit_t0;
  rec.fit_t1 = opt.fit_t1;
  for (int i = 0; i < T; ++i) {
    Eigen::MatrixXcd Ph(n, m), Sh(n, m);
    for (int k = 0; k <= half; ++k) {
      Ph.col(k) = blocks[k][i].head(n);
      Sh.col(k) = blocks[k][i].tail(n);
      if (k > 0 && k < half) {
        Ph.col(m - k) = blocks[k][i].head(n).conjugate();
        Sh.col(m - k) = blocks[k][i].tail(n).conjugate();
      }
    }
    Eigen::MatrixXcd phi(n, m), psi(n, m);
    for (int r = 0; r < n; ++r) {
      Eigen::VectorXcd row = Ph.row(r).transpose(), out;
      fft.inv(out, row);
      phi.row(r) = out.transpose();
      row = Sh.row(r).transpose();
      fft.inv(out, row);
      psi.row(r) = out.transpose();
    }
    Eigen::VectorXd P = times[i] > 0
                            ? modulation_prediction(yg, f, times[i], k0.lambda1_0,
                                                    k0.lambda2_0, k0.kappa1)
                            : Eigen::VectorXd::Zero(m);
    double res = 0, nx = 0;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd dphi = apply_symbol(Dsym, phi.col(j));
      double d1 = (dphi - P[j] * qp.cast<cd>()).squaredNorm();
      double d2 = (psi.col(j) - P[j] * rp.cast<cd>()).squaredNorm();
      res = std::max(res, std::sqrt(g.dz * (d1 + d2)));
      StatePair s(2 * n);
      s << phi.col(j), psi.col(j);
      nx = std::max(nx, x_norm(g, 0.0, s));
    }
    rec.residual.push_back(res);
    rec.norm_X.push_back(nx);
    double pmax = P.cwiseAbs().maxCoeff();
    rec.prediction_boundary.push_back(pmax > 0 ? std::abs(P[0]) / pmax : 0.0);
    if (opt.keep_snapshots) rec.snapshots.push_back({g, yg, phi, psi});
  }

  // log-log slope on the fit window
  std::vector<double> lx, ly;
  for (int i = 0; i < T; ++i)
    if (times[i] >= opt.fit_t0 * (1 - 1e-12) && times[i] <= opt.fit_t1 * (1 + 1e-12) &&
        rec.residual[i] > 0) {
      lx.push_back(std::log(times[i]));
      ly.push_back(std::log(rec.residual[i]));
    }
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size();
    my /= lx.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < lx.size(); ++i)
      sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    rec.decay_slope = sxy / sxx;
  }
  return rec;
}

DecayResult offresonant_decay(const ModelParams& p, const Grid1D& g, double eta0,
                              const StatePair& state0, const std::vector<double>& times) {
  if (times.size() < 4) throw DomainError("decay fit needs at least four times");
  const ClosedFormConstants k0 = closed_form_constants(p);
  OperatorMatrix M = assemble_L(p, g, eta0);
  ResonantBasis rb =
      resonant_basis(p, g, M, cd(-k0.lambda2_0 * eta0 * eta0, k0.lambda1_0 * eta0));
  DecayResult out;
  Eigen::Vector2cd c = project_resonant(rb, g, state0);
  out.resonant_content = c.cwiseAbs().maxCoeff();
  out.projected = out.resonant_content <= 1e-10 * std::max(1.0, x_norm(g, eta0, state0));

  Propagator P(M);
  out.times = times;
  for (double t : times) out.norms.push_back(x_norm(g, eta0, P.apply(state0, t)));

  const double tmid = 0.5 * (times.front() + times.back());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < tmid || !(out.norms[i] > 0)) continue;
    double x = times[i], y = std::log(out.norms[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) throw FitError("too few samples in the tail half of the window");
  out.rate = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  if (!(out.norms.back() < out.norms.front()) || !(out.rate < 0))
    throw FitError("norm does not decay over the window (rate " +
                   std::to_string(out.rate) + ")");
  return out;
}

}  // namespace blsw
