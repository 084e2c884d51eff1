#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blsw/dynamics.hpp"
#include "blsw/errors.hpp"
#include "oracles.hpp"

using namespace blsw;
using doctest::Approx;
using cd = std::complex<double>;

namespace {

struct Setup {
  ModelParams p = make_params(1, 2, 1.2, 0.5);
  Grid1D g = build_grid(p, 128);
};

StatePair bump(const Grid1D& g) {
  StatePair s(2 * g.n);
  for (int j = 0; j < g.n; ++j) {
    double z = g.nodes[j];
    s[j] = std::exp(-z * z / 20);
    s[g.n + j] = z * std::exp(-z * z / 30);
  }
  return s;
}

}  // namespace

TEST_CASE("evolve_mode: identity, group property, eigenvectors") {
  Setup S;
  const double eta = 0.2 * S.p.eps * S.p.eps;
  OperatorMatrix M = assemble_L(S.p, S.g, eta);
  StatePair s0 = bump(S.g);
  auto st = evolve_mode(M, s0, {0.0, 3.0, 7.0, 10.0});
  CHECK(st[0] == s0);
  auto from3 = evolve_mode(M, st[1], {7.0});
  CHECK((from3[0] - st[3]).norm() <= 1e-8 * st[3].norm());
  ResonantBasis rb = resonant_basis(S.p, S.g, eta);
  for (double t : {5.0, 50.0, 200.0}) {
    StatePair v = evolve_mode(M, rb.zeta, {t})[0];
    CHECK((v - std::exp(rb.lambda * t) * rb.zeta).norm() <= 1e-8 * rb.zeta.norm());
  }
  CHECK_THROWS_AS(evolve_mode(M, s0, {2.0, 1.0}), DomainError);
}

TEST_CASE("Propagator falls back to the matrix exponential") {
  Setup S;
  OperatorMatrix M = assemble_L(S.p, S.g, 0.1);
  Propagator eig(M), expm(M, 0.0);
  CHECK(eig.uses_eigenbasis());
  CHECK_FALSE(expm.uses_eigenbasis());
  StatePair s0 = bump(S.g);
  StatePair a = eig.apply(s0, 4.0), b = expm.apply(s0, 4.0);
  CHECK((a - b).norm() <= 1e-8 * a.norm());
}

TEST_CASE("resonant projections") {
  Setup S;
  const double eta = 0.3 * S.p.eps * S.p.eps;
  ResonantBasis rb = resonant_basis(S.p, S.g, eta);
  Eigen::Vector2cd c = project_resonant(rb, S.g, rb.g1);
  CHECK(std::abs(c[0] - 1.0) <= 1e-9);
  CHECK(std::abs(c[1]) <= 1e-9);
  StatePair rest = project_out_resonant(rb, S.g, bump(S.g));
  Eigen::Vector2cd z = project_resonant(rb, S.g, rest);
  CHECK(z.cwiseAbs().maxCoeff() <= 1e-12 * rest.norm());
  CHECK(resonant_part(rb, S.g, rest).norm() <= 1e-12 * rest.norm());
  Eigen::Vector2cd c2 = project_resonant(S.p, S.g, eta, rb.g2);
  CHECK(std::abs(c2[1] - 1.0) <= 1e-8);
}

TEST_CASE("mode coefficients follow the 2x2 system") {
  Setup S;
  StatePair s0 = bump(S.g);
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(5.0 * i);
  const double h = 0.05;
  for (double f : {0.1, 0.3}) {
    const double eta = f * S.p.eps * S.p.eps;
    ModeCoefficients mc = track_modes(S.p, S.g, eta, s0, times);
    for (size_t i = 0; i < times.size(); ++i) {
      double ref = std::exp(2 * times[i] * mc.lambda.real()) * mc.e[0];
      CHECK(std::abs(mc.e[i] - ref) <= 1e-8 * mc.e[0]);
    }
    for (double t : {20.0, 100.0}) {
      ModeCoefficients fd = track_modes(S.p, S.g, eta, s0, {t - h, t, t + h});
      Eigen::Vector2cd d = (fd.c[2] - fd.c[0]) / (2 * h);
      Eigen::Vector2cd Ac = fd.A.cast<cd>() * fd.c[1];
      CHECK((d - Ac).norm() <= 1e-6 * std::max(1.0, Ac.norm()));
    }
  }
}

TEST_CASE("modulation prediction") {
  ModelParams p = make_params(1, 2, 1.2, 0.5);
  ClosedFormConstants k = closed_form_constants(p);
  CHECK(modulation_multiplier(0.0, 10, 0.5, 1.0, 2.0) == Approx(2.5));

  SUBCASE("frequency domain against direct convolution") {
    YGrid yg = build_ygrid(400, 1024);
    const double s = 5.0, t = 100.0;
    Eigen::VectorXd f(yg.m);
    for (int j = 0; j < yg.m; ++j) f[j] = std::exp(-0.5 * yg.nodes[j] * yg.nodes[j] / (s * s));
    Eigen::VectorXd P = modulation_prediction(p, yg, f, t);
    for (int j = 0; j < yg.m; j += 37) {
      double y = yg.nodes[j];
      double ref = oracle::simpson(
          [&](double u) {
            return oracle::box_heat_kernel(y - u, t, k.lambda1_0, k.lambda2_0, k.kappa1) *
                   std::exp(-0.5 * u * u / (s * s));
          },
          -12 * s, 12 * s, 4000);
      CHECK(std::abs(P[j] - ref) <= 1e-8);
    }
    CHECK(modulation_kernel(0.0, t, k.lambda1_0, k.lambda2_0, k.kappa1) ==
          Approx(oracle::box_heat_kernel(0.0, t, k.lambda1_0, k.lambda2_0, k.kappa1)).epsilon(1e-14));
  }

  SUBCASE("point mass") {
    YGrid yg = build_ygrid(300, 512);
    const double mass = 0.7, t = 150;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(yg.m);
    f[yg.m / 2] = mass / yg.dy;
    Eigen::VectorXd P = modulation_prediction(p, yg, f, t);
    CHECK(P.sum() * yg.dy == Approx(mass * k.lambda1_0 * t / k.kappa1).epsilon(1e-10));
    CHECK(P.maxCoeff() <= mass / (2 * k.kappa1) * (1 + 1e-8));
  }

  SUBCASE("long-time plateau") {
    const double window = 2.0, t = 50 * window / k.lambda1_0;
    const double reach = k.lambda1_0 * t + 8 * std::sqrt(4 * k.lambda2_0 * t);
    YGrid yg = build_ygrid(1.5 * reach, 2048);
    Eigen::VectorXd f(yg.m);
    for (int j = 0; j < yg.m; ++j) f[j] = std::exp(-0.5 * std::pow(yg.nodes[j] - 1.0, 2) / 4.0);
    double integral = f.sum() * yg.dy;
    Eigen::VectorXd P = modulation_prediction(p, yg, f, t);
    for (int j = 0; j < yg.m; ++j)
      if (std::abs(yg.nodes[j]) <= window)
        CHECK(P[j] == Approx(integral / (2 * k.kappa1)).epsilon(0.01));
  }
}

TEST_CASE("field evolution edge cases") {
  Setup S;
  S.g = build_grid(S.p, 512);
  YGrid yg = build_ygrid(200, 16);
  std::vector<double> times = {0.0, 10.0, 100.0};

  Field2D zero{S.g, yg, Eigen::MatrixXcd::Zero(S.g.n, 16), Eigen::MatrixXcd::Zero(S.g.n, 16)};
  EvolutionRecord r0 = evolve_field(S.p, zero, times);
  for (double r : r0.residual) CHECK(r == 0.0);

  // the translation mode is stationary; Psi stays proportional to r'
  Field2D km = make_field(S.p, S.g, yg, "kernel-mode");
  EvolveOptions o;
  o.keep_snapshots = true;
  EvolutionRecord rk = evolve_field(S.p, km, times, o);
  Eigen::VectorXd rp = sample(S.g, [&](double z) { return eval_profile(S.p, z).rp; }, S.g.alpha);
  for (const Field2D& f : rk.snapshots)
    for (int j = 0; j < 16; j += 5) {
      Eigen::VectorXcd col = f.psi.col(j);
      cd a = col.dot(rp.cast<cd>()) / rp.squaredNorm();
      CHECK((col - a * rp.cast<cd>()).norm() <= 1e-6 * rp.norm());
      CHECK(std::abs(a - 1.0) <= 1e-6);
    }
  CHECK(rk.residual[2] == Approx(rk.residual[0]).epsilon(1e-6));

  CHECK_THROWS_AS(make_field(S.p, S.g, yg, "nope"), ConfigError);
  // an envelope far too narrow for the y grid
  CHECK_THROWS_AS(evolve_field(S.p, make_field(S.p, S.g, yg, "gaussian-phase-bump", 1, 2.0), times),
                  GridError);
}

TEST_CASE("projected-noise preset") {
  Setup S;
  YGrid yg = build_ygrid(200, 64);
  Field2D a = make_field(S.p, S.g, yg, "projected-noise", 5, 20.0);
  Field2D b = make_field(S.p, S.g, yg, "projected-noise", 5, 20.0);
  CHECK(a.phi == b.phi);
  Eigen::VectorXd f = modulation_source(S.p, a);
  CHECK(f.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("geometric times") {
  auto t = geometric_times(12.5, 800, 25);
  CHECK(t.size() == 25);
  CHECK(t.front() == 12.5);
  CHECK(t.back() == 800);
  CHECK(t[4] == Approx(25.0));
  CHECK_THROWS_AS(geometric_times(0, 1, 3), DomainError);
}

TEST_CASE("off-resonant decay and its controls") {
  ModelParams p = make_params(1, 2, 1.05, 0.5);
  Grid1D g = build_grid(p, 256);
  const double eta0 = 0.3 * p.eps * p.eps;
  const double beta = alpha_hat(p) / 16 * std::pow(p.eps, 3);
  std::vector<double> times;
  for (int i = 0; i <= 64; ++i) times.push_back(i * 4.0 / beta / 64);

  ResonantBasis rb = resonant_basis(p, g, eta0);
  StatePair s0 = project_out_resonant(rb, g, noise_state(p, g, 3));
  DecayResult d = offresonant_decay(p, g, eta0, s0, times);
  CHECK(d.projected);
  CHECK(d.rate <= -beta);

  // an eigenmode decays at exactly its own rate
  OperatorMatrix M = assemble_L(p, g, eta0);
  DenseEigen de = dense_eigen(M);
  int pick = -1;
  for (Eigen::Index k = 0; k < de.values.size(); ++k) {
    cd l = de.values[k];
    if (std::abs(l - rb.lambda) < 1e-6 || std::abs(l - std::conj(rb.lambda)) < 1e-6) continue;
    if (l.real() < -1e-3 && l.real() > -2e-2) {
      pick = static_cast<int>(k);
      break;
    }
  }
  REQUIRE(pick >= 0);
  StatePair v = de.right.col(pick);
  std::vector<double> tv;
  for (int i = 0; i <= 32; ++i) tv.push_back(i * 2.0 / -de.values[pick].real() / 32);
  DecayResult dv = offresonant_decay(p, g, eta0, v, tv);
  CHECK(dv.rate == Approx(de.values[pick].real()).epsilon(0.02));

  // the resonant mode itself is flagged and decays at Re lambda(eta0)
  DecayResult dr = offresonant_decay(p, g, eta0, rb.zeta, times);
  CHECK_FALSE(dr.projected);
  CHECK(dr.rate == Approx(rb.lambda.real()).epsilon(0.02));
  CHECK(dr.rate > d.rate);
}
