#include "blsw/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blsw/errors.hpp"
#include "parallel.hpp"

namespace blsw {

namespace {

template <typename F>
Eigen::VectorXcd profile_field(const Grid1D& g, const ModelParams& p, F&& f,
                               double s) {
  Eigen::VectorXcd v(g.n);
  for (int j = 0; j < g.n; ++j)
    v[j] = f(eval_profile(p, g.nodes[j])) * std::exp(s * g.nodes[j]);
  return v;
}

StatePair stack(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  StatePair w(u.size() + v.size());
  w << u, v;
  return w;
}

}  // namespace

ZetaQuadruple zeta_quadruple(const ModelParams& p, const Grid1D& g) {
  const double al = g.alpha, c = p.c;
  auto B0 = [&](cd w) { return 1.0 + p.b * w * w; };
  auto A0 = [&](cd w) { return 1.0 + p.a * w * w; };
  using PB = const ProfileBundle&;

  ZetaQuadruple zq;
  zq.zeta1 = stack(profile_field(g, p, [](PB b) { return b.q; }, al),
                   profile_field(g, p, [](PB b) { return b.rp; }, al));
  zq.zeta2 = stack(profile_field(g, p, [](PB b) { return b.tail_int; }, al),
                   profile_field(g, p, [](PB b) { return -b.dr_dc; }, al));

  Eigen::VectorXcd drdc = profile_field(g, p, [](PB b) { return b.dr_dc; }, -al);
  Eigen::VectorXcd head = profile_field(g, p, [](PB b) { return b.head_int; }, -al);
  Eigen::VectorXcd rest = profile_field(
      g, p, [](PB b) { return 2.0 * b.q * b.dq_dc + b.qp * b.head_int; }, -al);
  zq.zeta1_star = c * stack(-multiplier_apply(g, B0, drdc, -al) - rest,
                            multiplier_apply(g, B0, head, -al));

  Eigen::VectorXcd qp = profile_field(g, p, [](PB b) { return b.qp; }, -al);
  Eigen::VectorXcd r = profile_field(g, p, [](PB b) { return b.r; }, -al);
  zq.zeta2_star = stack(multiplier_apply(g, A0, qp, -al),
                        -multiplier_apply(g, B0, r, -al));
  return zq;
}

Eigen::Matrix2d pairing_matrix(const ZetaQuadruple& zq, const Grid1D& g) {
  const StatePair* right[2] = {&zq.zeta1, &zq.zeta2};
  const StatePair* left[2] = {&zq.zeta1_star, &zq.zeta2_star};
  Eigen::Matrix2d G;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) G(i, j) = pairing(g, *right[i], *left[j]).real();
  return G;
}

NDValues nd_polynomials(double a, double b, double c) {
  const double c2 = c * c, c4 = c2 * c2, c6 = c4 * c2, c8 = c4 * c4;
  NDValues v;
  v.n_val = 7 * a * a - b * a + (4 * a * a - 10 * b * a) * c2 +
            (3 * b * b + 4 * a * a - 7 * a * b) * c4 + 6 * b * (b - 2 * a) * c6 +
            6 * b * b * c8;
  v.d_val = 6 * a * a + (3 * a * a - 9 * a * b) * c2 +
            (6 * a * a + 2 * b * b - 2 * a * b) * c4 + (b * b - 19 * a * b) * c6 +
            12 * b * b * c8;
  return v;
}

NDValues nd_polynomials_drho(double a, double b, double rho) {
  NDValues v;
  v.n_val = 4 * a * a - 10 * b * a + 2 * (3 * b * b + 4 * a * a - 7 * a * b) * rho +
            18 * b * (b - 2 * a) * rho * rho + 24 * b * b * rho * rho * rho;
  v.d_val = 3 * a * a - 9 * a * b + 2 * (6 * a * a + 2 * b * b - 2 * a * b) * rho +
            3 * (b * b - 19 * a * b) * rho * rho + 48 * b * b * rho * rho * rho;
  return v;
}

ClosedFormConstants closed_form_constants(const ModelParams& p) {
  const double a = p.a, b = p.b, c = p.c;
  const double c2 = c * c, c4 = c2 * c2, e2 = c2 - 1.0;
  const Energy en = energy_and_derivative(p);
  ClosedFormConstants k;
  k.G11 = 0.5 * en.dE_dc;
  if (!(std::abs(k.G11) > 1e-12))
    throw DomainError("degenerate pairing <zeta2, zeta2*>");
  k.G21 = 16.0 / (3.0 * c4) * (b * c4 - a) / e2 *
          (a * e2 + (b * c2 - a) + 2.0 * c4 * (2.0 * b * c2 - b - a)) /
          (b * c2 - a);
  k.L1_pairing = -8.0 / 15.0 * e2 / c * p.alpha_c *
                 (2.0 * c2 * (b - a) + 3.0 * (b * c4 - a));
  k.lambda1_0 = std::sqrt(k.L1_pairing / (-k.G11));
  NDValues nd = nd_polynomials(a, b, c);
  k.lambda2_0 = 32.0 * (b * c4 - a) * nd.n_val / (3.0 * nd.d_val * en.dE_dc);
  k.kappa1 = 0.5 * k.lambda1_0 * en.dE_dc;
  return k;
}

StatePair apply_L1_0(const ModelParams& p, const Grid1D& g, const StatePair& w) {
  const int n = g.n;
  const cd I(0, 1);
  auto sym = [&](auto m) { return symbol_values(g, m, g.alpha); };
  Eigen::VectorXcd A0 = sym([&](cd z) { return 1.0 + p.a * z * z; });
  Eigen::VectorXcd Binv = sym([&](cd z) { return 1.0 / (1.0 + p.b * z * z); });
  Eigen::VectorXcd D = sym([&](cd z) { return I * z; });
  Eigen::VectorXcd D2 = sym([&](cd z) { return -z * z; });
  Potentials v = sample_potentials(p, g);

  Eigen::VectorXcd u1 = w.head(n), u2 = w.tail(n);
  Eigen::VectorXcd a0u = apply_symbol(A0, u1);
  Eigen::VectorXcd first = u1 - a0u - apply_symbol(Binv, a0u) +
                           v.r.cwiseProduct(u1);
  Eigen::VectorXcd pot = 2.0 * v.rp.cwiseProduct(apply_symbol(D, u1)) +
                         v.r.cwiseProduct(apply_symbol(D2, u1)) +
                         2.0 * v.q.cwiseProduct(apply_symbol(D, u2)) +
                         v.qp.cwiseProduct(u2);
  StatePair out = StatePair::Zero(2 * n);
  out.tail(n) = apply_symbol(Binv, first) +
                p.b * apply_symbol(Binv, apply_symbol(Binv, pot));
  return out;
}

double l1_pairing_numeric(const ModelParams& p, const Grid1D& g) {
  ZetaQuadruple zq = zeta_quadruple(p, g);
  return pairing(g, apply_L1_0(p, g, zq.zeta1), zq.zeta2_star).real();
}

CurveFit fit_curve(const std::vector<double>& etas, const std::vector<cd>& lambdas,
                   double window) {
  std::vector<int> idx;
  for (size_t i = 0; i < etas.size(); ++i)
    if (std::abs(etas[i]) <= window * (1 + 1e-12) && etas[i] != 0.0) idx.push_back(i);
  CurveFit f;
  f.points = static_cast<int>(idx.size());
  if (idx.size() < 3) throw FitError("fewer than three nonzero samples in fit window");
  const int m = f.points;
  Eigen::MatrixXd Ai(m, 2);
  Eigen::VectorXd bi(m), ar(m), br(m);
  for (int k = 0; k < m; ++k) {
    double e = etas[idx[k]];
    Ai(k, 0) = e;
    Ai(k, 1) = e * e * e;
    bi[k] = lambdas[idx[k]].imag();
    ar[k] = -e * e;
    br[k] = lambdas[idx[k]].real();
  }
  Eigen::Vector2d ci = Ai.colPivHouseholderQr().solve(bi);
  f.lambda1 = ci[0];
  f.lambda3 = ci[1];
  f.lambda2 = ar.dot(br) / ar.squaredNorm();
  Eigen::MatrixXd Aq(m, 2);
  Aq.col(0) = ar;
  Aq.col(1) = ar.cwiseProduct(ar);
  f.lambda2_quartic = Aq.colPivHouseholderQr().solve(br)[0];
  f.residual_im = std::sqrt((Ai * ci - bi).squaredNorm() / m);
  f.residual_re = std::sqrt((f.lambda2 * ar - br).squaredNorm() / m);
  return f;
}

EigenCurve resonant_curve(const ModelParams& p, const Grid1D& g, double eta_max,
                          int n_eta, const CurveOptions& opt) {
  if (!(eta_max > 0) || n_eta < 3)
    throw DomainError("resonant_curve needs eta_max > 0 and n_eta >= 3");
  const ClosedFormConstants k0 = closed_form_constants(p);

  std::vector<double> etas(n_eta);
  for (int i = 0; i < n_eta; ++i)
    etas[i] = -eta_max + 2.0 * eta_max * i / (n_eta - 1);
  for (auto& e : etas)
    if (std::abs(e) < 1e-14 * eta_max) e = 0.0;

  std::vector<double> pos;
  for (double e : etas)
    if (e > 0) pos.push_back(e);
  std::sort(pos.begin(), pos.end());

  // serial warm start along eta > 0
  const double min_step = opt.min_step_fraction * eta_max;
  std::vector<cd> lam_pos(pos.size());
  std::vector<double> res_pos(pos.size());
  std::vector<StatePair> vec_pos(pos.size());
  double e0 = 0.0, e1 = 0.0;
  cd l0 = 0.0, l1 = 0.0;
  bool have_two = false;
  auto predict = [&](double e) -> cd {
    if (e1 == 0.0) return cd(-k0.lambda2_0 * e * e, k0.lambda1_0 * e);
    if (!have_two) return l1 * (e / e1);
    // quadratic through (0, 0), (e0, l0), (e1, l1)
    cd s0 = l0 / e0, s1 = l1 / e1;
    return e * (s1 + (s1 - s0) / (e1 - e0) * (e - e1));
  };
  size_t next = 0;
  double step = pos.empty() ? 0 : pos[0];
  while (next < pos.size()) {
    double e = std::min(pos[next], e1 + step);
    cd guess = predict(e);
    double scale = std::max(std::abs(guess - l1), 1e-3 * k0.lambda1_0 * e);
    OperatorMatrix M = assemble_L(p, g, e);
    auto ev = eigs_near(M, guess, 1);
    cd lam = ev[0].lambda;
    if (lam.imag() < 0) lam = std::conj(lam);
    if (std::abs(lam - guess) > 10.0 * scale || !(lam.imag() > 0)) {
      step *= 0.5;
      if (step < min_step)
        throw ContinuationError("eigenvalue tracking lost near eta=" +
                                std::to_string(e));
      continue;
    }
    if (e1 > 0) {
      e0 = e1;
      l0 = l1;
      have_two = true;
    }
    e1 = e;
    l1 = lam;
    if (e == pos[next]) {
      lam_pos[next] = lam;
      res_pos[next] = ev[0].residual;
      if (opt.keep_vectors)
        vec_pos[next] = ev[0].lambda.imag() < 0 ? StatePair(ev[0].right.conjugate())
                                                : ev[0].right;
      ++next;
      step = next < pos.size() ? pos[next] - e1 : step;
    } else {
      step = std::min(2.0 * step, pos[next] - e1);
    }
  }

  EigenCurve curve;
  curve.etas = etas;
  curve.lambdas.resize(n_eta);
  curve.residuals.resize(n_eta);
  if (opt.keep_vectors) curve.vectors.resize(n_eta);

  // remaining points with frozen targets
  detail::parallel_for(n_eta, opt.threads, [&](int i) {
    double e = etas[i];
    if (e > 0) {
      size_t j = std::lower_bound(pos.begin(), pos.end(), e) - pos.begin();
      curve.lambdas[i] = lam_pos[j];
      curve.residuals[i] = res_pos[j];
      if (opt.keep_vectors) curve.vectors[i] = vec_pos[j];
      return;
    }
    OperatorMatrix M = assemble_L(p, g, e);
    if (e == 0.0) {
      auto ev = eigs_near(M, 0.0, 2);
      curve.lambdas[i] = 0.5 * (ev[0].lambda + ev[1].lambda);
      curve.residuals[i] = std::max(ev[0].residual, ev[1].residual);
      if (opt.keep_vectors) curve.vectors[i] = ev[0].right;
      return;
    }
    size_t j = std::lower_bound(pos.begin(), pos.end(), -e * (1 - 1e-12)) - pos.begin();
    cd target = j < pos.size() ? std::conj(lam_pos[j]) : cd(-k0.lambda2_0 * e * e, k0.lambda1_0 * e);
    auto ev = eigs_near(M, target, 1);
    curve.lambdas[i] = ev[0].lambda;
    curve.residuals[i] = ev[0].residual;
    if (opt.keep_vectors) curve.vectors[i] = ev[0].right;
  });
  curve.fit = fit_curve(curve.etas, curve.lambdas, 0.5 * eta_max);
  return curve;
}

Eigen::Matrix2d ResonantBasis::A() const {
  Eigen::Matrix2d m;
  if (jordan) {
    m << 0.0, 1.0 / jordan_g22, 0.0, 0.0;
    return m;
  }
  m << lambda.real(), lambda.imag() / kappa, -kappa * lambda.imag(), lambda.real();
  return m;
}

ResonantBasis resonant_basis(const ModelParams& p, const Grid1D& g, double eta) {
  const ClosedFormConstants k0 = closed_form_constants(p);
  OperatorMatrix M = assemble_L(p, g, eta);
  cd guess(-k0.lambda2_0 * eta * eta, k0.lambda1_0 * eta);
  return resonant_basis(p, g, M, guess);
}

ResonantBasis resonant_basis(const ModelParams& p, const Grid1D& g,
                             const OperatorMatrix& M, cd guess) {
  const double eta = M.eta;
  ZetaQuadruple zq = zeta_quadruple(p, g);
  Eigen::Matrix2d G = pairing_matrix(zq, g);
  ResonantBasis rb;
  rb.eta = eta;

  if (eta == 0.0) {
    // biorthonormal Jordan basis
    const double g11 = G(0, 0), g21 = G(1, 0), g22 = G(1, 1);
    rb.jordan = true;
    rb.jordan_g22 = g22;
    rb.g1 = zq.zeta1;
    rb.g2 = (zq.zeta2 - (g21 / g11) * zq.zeta1) / g22;
    rb.g1_star = zq.zeta1_star / g11;
    rb.g2_star = zq.zeta2_star;
    rb.zeta = rb.g = zq.zeta1;
    rb.zeta_star = rb.g_star = zq.zeta2_star;
    auto ev = eigs_near(M, 0.0, 1);
    rb.residual = ev[0].residual;
    return rb;
  }

  auto ev = eigs_near(M, guess, 1);
  cd lam = ev[0].lambda;
  StatePair right = ev[0].right, left = ev[0].left;
  if (lam.imag() * eta < 0) {
    lam = std::conj(lam);
    right = right.conjugate().eval();
    left = left.conjugate().eval();
  }
  rb.lambda = lam;
  rb.residual = ev[0].residual;

  cd s = G(0, 0) / pairing(g, right, zq.zeta1_star);
  rb.zeta = s * right;
  cd ss = std::conj(G(1, 1) / pairing(g, zq.zeta2, left));
  rb.zeta_star = ss * left;

  cd P = pairing(g, rb.zeta, rb.zeta_star);
  rb.g = cd(1.0, P.real() / P.imag()) * rb.zeta;
  rb.g_star = rb.zeta_star;
  rb.kappa = 0.5 * pairing(g, rb.g, rb.g_star).imag();
  if (!(std::abs(rb.kappa) >= 1e-12))
    throw DegenerateModeError("kappa(eta) below 1e-12 at eta=" + std::to_string(eta));

  rb.g1 = rb.g.real().cast<cd>();
  rb.g2 = (rb.g.imag() / rb.kappa).cast<cd>();
  rb.g1_star = (-rb.g_star.imag() / rb.kappa).cast<cd>();
  rb.g2_star = rb.g_star.real().cast<cd>();
  return rb;
}

}  // namespace blsw
