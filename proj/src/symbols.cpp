#include "blsw/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace blsw {

using cd = std::complex<double>;

SymbolPoint symbol_point(double xi, double eta, const ModelParams& p) {
  SymbolPoint s;
  s.xi = xi;
  s.alpha = p.alpha;
  s.eta = eta;
  s.mu = mu(xi, p.alpha, eta);
  s.S = big_S(xi, p.alpha, eta, p);
  auto [lp, lm] = lambda_pm(xi, eta, p);
  s.lam_plus = lp;
  s.lam_minus = lm;
  cd w(xi, p.alpha);
  cd k2 = w * w + eta * eta;
  s.A = 1.0 + p.a * k2;
  s.B = 1.0 + p.b * k2;
  return s;
}

const BoundCheck* BoundReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

struct Sampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{0.0, 1.0};

  explicit Sampler(std::uint64_t seed) : rng(seed) {}
  double u(double lo, double hi) { return lo + (hi - lo) * unit(rng); }
  double logu(double lo, double hi) {
    return std::exp(u(std::log(lo), std::log(hi)));
  }
  double sign() { return unit(rng) < 0.5 ? -1.0 : 1.0; }

  // Mixed cover of the plane: box, log-scales, and a patch near 0.
  std::pair<double, double> plane(double alpha) {
    double pick = unit(rng);
    double xi, eta;
    if (pick < 0.3) {
      xi = u(-10, 10);
      eta = u(-10, 10);
    } else if (pick < 0.7) {
      xi = sign() * logu(1e-6, 1e6);
      eta = sign() * logu(1e-6, 1e6);
    } else {
      xi = u(-3 * alpha, 3 * alpha);
      eta = u(-3 * alpha, 3 * alpha);
    }
    if (unit(rng) < 0.05) xi = 0.0;
    return {xi, eta};
  }
};

class Recorder {
 public:
  Recorder(BoundReport& rep, double slack) : rep_(rep), slack_(slack) {}

  // Records a normalized margin; violation when margin > slack.
  void record(const std::string& name, double margin, bool strict = false) {
    BoundCheck& c = get(name);
    ++c.samples;
    if (std::isnan(margin)) margin = std::numeric_limits<double>::infinity();
    c.worst_margin = std::max(c.worst_margin, margin);
    bool bad = strict ? margin >= 0.0 : margin > slack_;
    if (bad) ++c.violations;
  }

  void finish() {
    for (const auto& c : rep_.checks)
      if (c.violations > 0)
        rep_.violations.push_back(c.name + ": " +
                                  std::to_string(c.violations) + "/" +
                                  std::to_string(c.samples) +
                                  " worst margin " +
                                  std::to_string(c.worst_margin));
  }

 private:
  BoundCheck& get(const std::string& name) {
    for (auto& c : rep_.checks)
      if (c.name == name) return c;
    rep_.checks.push_back({name});
    return rep_.checks.back();
  }
  BoundReport& rep_;
  double slack_;
};

}  // namespace

BoundReport verify_symbol_bounds(const ModelParams& p, std::int64_t n_samples,
                                 std::uint64_t rng_seed,
                                 const SymbolCheckOptions& opt) {
  if (n_samples < 1) throw DomainError("n_samples must be >= 1");
  const double a = p.a, b = p.b, c = p.c, al = p.alpha, eps = p.eps;
  const double ah = al / eps;
  BoundReport rep;
  rep.delta = opt.delta > 0 ? opt.delta : std::pow(eps, 1.0 / 20.0);
  rep.K = opt.K > 0 ? opt.K : std::pow(rep.delta, -3.0);
  rep.beta_hat = opt.beta_hat_fraction * ah;
  const double delta = rep.delta, K = rep.K, Ke = K * eps;
  const double line = -rep.beta_hat * eps * eps * eps;  // Re lambda
  const double S0 = std::abs(big_S(0.0, al, 0.0, p));

  Recorder rec(rep, opt.slack);
  Sampler smp(rng_seed);

  auto resolvent = [&](const SymbolPoint& s) {
    double gp = line - s.lam_plus.real(), gm = line - s.lam_minus.real();
    double ip = gp > 0 ? 1.0 / gp : std::numeric_limits<double>::infinity();
    double im = gm > 0 ? 1.0 / gm : std::numeric_limits<double>::infinity();
    rep.sup_inv_plus = std::max(rep.sup_inv_plus, ip);
    rep.sup_inv_minus = std::max(rep.sup_inv_minus, im);
    rep.sup_inv_minus_at_zero =
        std::max(rep.sup_inv_minus_at_zero, 1.0 / std::abs(s.lam_minus));
  };

  // Claims on mu, S and lambda_pm over the whole plane.
  for (std::int64_t k = 0; k < n_samples; ++k) {
    auto [xi, eta] = smp.plane(al);
    SymbolPoint s = symbol_point(xi, eta, p);
    cd w(xi, al);
    const cd I(0, 1);
    double scale = std::abs(s.lam_plus) + std::abs(s.lam_minus);
    rec.record("identities",
               std::max(std::abs(s.lam_plus + s.lam_minus - 2.0 * I * c * w),
                        std::abs(s.lam_plus - s.lam_minus -
                                 2.0 * I * s.mu * s.S)) /
                       scale -
                   1e-12);

    rec.record("im_mu", std::max(-s.mu.imag(), s.mu.imag() - al) / al);
    rec.record("im_mu_eta0", std::abs(mu(xi, al, 0.0).imag() - al) / al);
    if (xi != 0.0) {
      double sx = xi > 0 ? 1.0 : -1.0;
      rec.record("sign_mu", -std::min(sx * s.mu.real(), s.mu.imag()), true);
      double eta2 = eta * (1.0 + smp.logu(1e-3, 1e3));
      rec.record("im_mu_monotone",
                 (mu(xi, al, eta2).imag() - s.mu.imag()) / al);
      rec.record("cl_sf1", sx * s.S.imag(), true);
    }
    rec.record("cl_sf0", -s.S.real(), true);

    double absS = std::abs(s.S);
    if (xi != 0.0 || eta != 0.0) {
      rec.record("cl_sf2",
                 std::max({(std::sqrt(a / b) - absS) / std::sqrt(a / b),
                           (absS - S0) / S0, (S0 - c) / c}));
    }
    double X = xi * xi + eta * eta - al * al;
    double frac = 0.5 * (b - a) * X / (1.0 + b * X);
    rec.record("cl_sf3", absS - (1.0 - frac));

    double rp = s.lam_plus.real(), rm = s.lam_minus.real();
    rec.record("cl_sf4", std::max((-2.0 * al * c - rp) / (al * c),
                                  (rp + al * c) / (al * c)));
    rec.record("cl_sf5_prime", (rm + al * (c - 1.0 + frac)) / (al * c));
    rec.record("cl_sf5", std::max((-al * c - rm) / (al * c),
                                  (rm + 0.5 * al * (c - 1.0)) / (al * c)));
    resolvent(s);
  }

  // Regional bounds in long-wave variables.
  auto absw = [&](double xi) { return std::hypot(xi, al); };
  const double e3 = eps * eps * eps;

  // A_low: only the resolvent sups use it.
  for (std::int64_t k = 0; k < n_samples; ++k) {
    double xi = smp.u(-Ke, Ke);
    double eta = smp.u(-1, 1) * Ke * absw(xi);
    resolvent(symbol_point(xi, eta, p));
  }
  if (Ke < delta) {
    for (std::int64_t k = 0; k < n_samples; ++k) {
      double xi = smp.sign() * (k % 2 ? smp.u(Ke, delta) : smp.logu(Ke, delta));
      double eta = smp.u(-1, 1) * delta * absw(xi);
      SymbolPoint s = symbol_point(xi, eta, p);
      double xh = xi / eps;
      double bound = -0.25 * ah * e3 * (1.0 + (b - a) * xh * xh);
      rec.record("lm_xi_m", (s.lam_minus.real() - bound) / std::abs(bound));
      resolvent(s);
    }
    for (std::int64_t k = 0; k < n_samples; ++k) {
      double xi = smp.u(-Ke, Ke);
      double eta = smp.sign() * smp.logu(Ke * absw(xi), delta * absw(xi));
      SymbolPoint s = symbol_point(xi, eta, p);
      double xh = xi / eps, eh = eta / (eps * eps);
      double bound = -0.25 * al * e3 * eh * eh / (xh * xh + ah * ah);
      rec.record("lm_eta_m", (s.lam_minus.real() - bound) / std::abs(bound));
      resolvent(s);
    }
  }

  // High-frequency region: calibrate C on a deterministic sweep, then test.
  auto high_point = [&](double t, double v, double sgn_xi, bool by_xi) {
    // t, v in [0,1]: log-positions along the region's two directions
    double xi, eta;
    if (by_xi) {
      xi = sgn_xi * delta * std::pow(1e6 / delta, t);
      eta = (v < 0.5 ? -1.0 : 1.0) * 1e-6 * std::pow(1e12, std::abs(2 * v - 1));
    } else {
      xi = sgn_xi * delta * t;
      double lo = delta * absw(xi);
      eta = (v < 0.5 ? -1.0 : 1.0) * lo * std::pow(1e6 / lo, std::abs(2 * v - 1));
    }
    return std::pair{xi, eta};
  };
  double cal = std::numeric_limits<double>::infinity();
  const int G = 400;
  for (int by = 0; by < 2; ++by)
    for (int i = 0; i <= G; ++i)
      for (int j = 0; j <= G; ++j)
        for (double sg : {-1.0, 1.0}) {
          auto [xi, eta] = high_point(double(i) / G, double(j) / G, sg, by);
          double rm = lambda_pm(xi, eta, p).second.real();
          cal = std::min(cal, -rm / (delta * delta * eps));
        }
  rep.high_constant = 0.5 * cal;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    bool by_xi = k % 2 == 0;
    auto [xi, eta] = high_point(smp.unit(smp.rng), smp.unit(smp.rng),
                                smp.sign(), by_xi);
    SymbolPoint s = symbol_point(xi, eta, p);
    double bound = -rep.high_constant * delta * delta * eps;
    rec.record("high", (s.lam_minus.real() - bound) / std::abs(bound));
    resolvent(s);
  }

  // Long-wave free symbol.
  if (ah > 0 && ah < p.alpha_hat0) {
    double beta0 = kp_beta0(ah, p);
    for (std::int64_t k = 0; k < n_samples; ++k) {
      auto [xi, eta] = smp.plane(ah);
      double re = kp_free_symbol(xi, ah, eta, p).real();
      rec.record("kp_beta0", (re + beta0) / beta0);
      cd Lam(-beta0 + smp.logu(1e-6, 10.0), smp.u(-10, 10));
      double lhs = 1.0 / std::abs(Lam - kp_free_symbol(xi, ah, eta, p));
      double rhs = (1.0 + 1e-9) / (Lam.real() + beta0);
      rec.record("kp_resolvent", (lhs - rhs) / rhs, true);
    }
  }

  rep.C_plus = rep.sup_inv_plus * eps;
  rep.C_minus = rep.sup_inv_minus * e3;
  rec.finish();
  return rep;
}

}  // namespace blsw
