#include "blsw/kp.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "blsw/errors.hpp"
#include "blsw/resonance.hpp"
#include "parallel.hpp"

namespace blsw {

namespace {

using cd = std::complex<double>;
const cd I(0, 1);

// e^{s xh} sech(xh) without overflow
cd exp_sech(cd s, double xh) {
  double ax = std::abs(xh);
  return 2.0 * std::exp(s * xh - ax) / (1.0 + std::exp(-2.0 * ax));
}

double sech(double s) {
  double e = std::exp(-std::abs(s));
  return 2.0 * e / (1.0 + e * e);
}

struct KPLocal {
  double ah0, g1;
};

KPLocal local(const ModelParams& p) {
  return {p.alpha_hat0, 4.0 * std::sqrt((p.b - p.a) / 3.0)};
}

cd g0_value(const KPLocal& k, double eta, double x) {
  cd kk = std::sqrt(1.0 + I * k.g1 * eta);
  double xh = 0.5 * k.ah0 * x;
  double th = std::tanh(xh), se = sech(xh);
  return exp_sech(-kk, xh) * ((kk + th) * (kk + th) - se * se) / (2.0 * k.g1 * kk);
}

// g0* without the i alpha_hat0 / (2 eta) prefactor
cd g0s_core(const KPLocal& k, double eta, double x) {
  cd ks = std::sqrt(1.0 - I * k.g1 * eta);
  double xh = 0.5 * k.ah0 * x;
  return exp_sech(ks, xh) * (ks - std::tanh(xh));
}

KPModeValues limit_modes(const KPLocal& k, double x) {
  double xh = 0.5 * k.ah0 * x;
  double th = std::tanh(xh), se = sech(xh);
  double theta = se * se;
  double dtheta = -k.ah0 * theta * th;
  KPModeValues m;
  m.g01 = -std::sqrt(3.0) / 2.0 * dtheta;
  m.g02 = theta + (0.5 * x + 1.0 / k.ah0) * dtheta;
  double one_plus_th = 2.0 / (1.0 + std::exp(-2.0 * xh));
  m.g01_star = k.ah0 / (2.0 * std::sqrt(3.0)) *
               (x * theta + 2.0 / k.ah0 * one_plus_th);
  m.g02_star = 0.5 * k.ah0 * theta;
  return m;
}

}  // namespace

KPConstants kp_constants(const ModelParams& p) {
  KPConstants k;
  k.gamma1 = 4.0 * std::sqrt((p.b - p.a) / 3.0);
  k.alpha_hat0 = p.alpha_hat0;
  k.lambda1_limit = 1.0 / std::sqrt(3.0);
  k.lambda2_limit = 2.0 / (3.0 * p.alpha_hat0);
  return k;
}

cd lambda_kp(double eta, const ModelParams& p) {
  double g1 = 4.0 * std::sqrt((p.b - p.a) / 3.0);
  return I * eta / std::sqrt(3.0) * std::sqrt(1.0 + I * g1 * eta);
}

KPModeValues kp_modes_at(double eta, const ModelParams& p, double x) {
  KPLocal k = local(p);
  if (std::abs(eta) < 1e-6) return limit_modes(k, x);
  cd gp = g0_value(k, eta, x), gm = g0_value(k, -eta, x);
  cd sp = g0s_core(k, eta, x), sm = g0s_core(k, -eta, x);
  KPModeValues m;
  m.g01 = gp + gm;
  m.g02 = (gp - gm) / (I * eta);
  // g0*(-eta) carries the prefactor i alpha_hat0 / (-2 eta)
  m.g01_star = 0.5 * (I * k.ah0 / (2.0 * eta)) * (sp - sm);
  m.g02_star = 0.25 * k.ah0 * (sp + sm);
  return m;
}

std::pair<cd, cd> kp_singular_pair_at(double eta, const ModelParams& p, double x) {
  if (eta == 0.0) throw DomainError("g0 and g0* are singular at eta = 0");
  KPLocal k = local(p);
  return {g0_value(k, eta, x), I * k.ah0 / (2.0 * eta) * g0s_core(k, eta, x)};
}

KPModes kp_modes(double eta, const ModelParams& p, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  KPModes m;
  m.g01.resize(n);
  m.g02.resize(n);
  m.g01_star.resize(n);
  m.g02_star.resize(n);
  if (eta != 0.0) {
    m.g0.resize(n);
    m.g0_star.resize(n);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    KPModeValues v = kp_modes_at(eta, p, x[j]);
    m.g01[j] = v.g01;
    m.g02[j] = v.g02;
    m.g01_star[j] = v.g01_star;
    m.g02_star[j] = v.g02_star;
    if (eta != 0.0) std::tie(m.g0[j], m.g0_star[j]) = kp_singular_pair_at(eta, p, x[j]);
  }
  return m;
}

namespace {

template <typename F>
cd integrate_line(F&& f, double X) {
  using boost::math::quadrature::gauss_kronrod;
  auto re = [&](double x) { return f(x).real(); };
  auto im = [&](double x) { return f(x).imag(); };
  double r = 0, i = 0;
  // split at the origin where the modes concentrate
  r += gauss_kronrod<double, 61>::integrate(re, -X, 0.0, 25, 1e-15);
  r += gauss_kronrod<double, 61>::integrate(re, 0.0, X, 25, 1e-15);
  i += gauss_kronrod<double, 61>::integrate(im, -X, 0.0, 25, 1e-15);
  i += gauss_kronrod<double, 61>::integrate(im, 0.0, X, 25, 1e-15);
  return {r, i};
}

cd pick(const KPModeValues& v, int k, bool star) {
  if (star) return k == 1 ? v.g01_star : v.g02_star;
  return k == 1 ? v.g01 : v.g02;
}

}  // namespace

cd kp_pairing(double eta, const ModelParams& p, int j, int k) {
  const double X = 80.0 / p.alpha_hat0;
  return integrate_line(
      [&](double x) {
        KPModeValues v = kp_modes_at(eta, p, x);
        return pick(v, j, false) * std::conj(pick(v, k, true));
      },
      X);
}

cd kp_singular_pairing(double eta, const ModelParams& p, int s) {
  const double X = 80.0 / p.alpha_hat0;
  return integrate_line(
      [&](double x) {
        cd g = kp_singular_pair_at(eta, p, x).first;
        cd gs = kp_singular_pair_at(s * eta, p, x).second;
        return g * std::conj(gs);
      },
      X);
}

std::vector<KPRow> kp_convergence_study(double a, double b,
                                        const std::vector<double>& eps_list,
                                        double eta, const KPStudyOptions& opt) {
  std::vector<KPRow> rows(eps_list.size());
  for (size_t i = 0; i < eps_list.size(); ++i) {
    const double eps = eps_list[i];
    ModelParams p = make_params(a, b, std::sqrt(1.0 + eps * eps), opt.alpha_fraction);
    KPRow& row = rows[i];
    row.eps = eps;
    row.c = p.c;
    row.kp_lambda = lambda_kp(eta, p);
    if (eta == 0.0) {
      Grid1D g = build_grid(p, opt.n, opt.tail_decades / p.alpha);
      auto ev = eigs_near(assemble_L(p, g, 0.0), 0.0, 2);
      cd lam = 0.5 * (ev[0].lambda + ev[1].lambda);
      row.scaled_lambda = lam / (eps * eps * eps);
      row.residual = std::max(ev[0].residual, ev[1].residual);
      row.error = std::abs(row.scaled_lambda - row.kp_lambda);
      continue;
    }
    Grid1D g = build_grid(p, opt.n, opt.tail_decades / p.alpha);
    CurveOptions co;
    co.threads = opt.threads;
    EigenCurve curve = resonant_curve(p, g, eps * eps * std::abs(eta), opt.n_eta, co);
    size_t j = eta > 0 ? curve.etas.size() - 1 : 0;
    row.scaled_lambda = curve.lambdas[j] / (eps * eps * eps);
    row.residual = curve.residuals[j];
    row.error = std::abs(row.scaled_lambda - row.kp_lambda);
  }
  return rows;
}

}  // namespace blsw
