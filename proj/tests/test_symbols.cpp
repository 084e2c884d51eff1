#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "blsw/symbols.hpp"

using namespace blsw;
using doctest::Approx;
using cd = std::complex<double>;

TEST_CASE("mu special values") {
  cd m = mu(1.0, 0.5, 0.0);
  CHECK(m.real() == Approx(1.0));
  CHECK(m.imag() == Approx(0.5));
  CHECK(mu(0.0, 0.5, 0.3).imag() == Approx(0.4).epsilon(1e-14));
  cd n = mu(-1.0, 0.5, 0.0);
  CHECK(n.real() == Approx(-1.0));
  CHECK(n.imag() == Approx(0.5));
  CHECK(n.real() * -1.0 > 0);
}

TEST_CASE("mu squares to the shifted symbol") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int k = 0; k < 2000; ++k) {
    double xi = u(rng), eta = u(rng), al = 0.3;
    cd w(xi, al);
    cd m = mu(xi, al, eta);
    CHECK(std::abs(m * m - (w * w + eta * eta)) <= 1e-12 * (1 + std::norm(w) + eta * eta));
    if (xi != 0) CHECK(xi * m.real() > 0);
  }
}

TEST_CASE("big_S values and limits") {
  ModelParams p = make_params(1, 2, 1.2, 0.5);
  CHECK(std::abs(big_S(0.0, 0.0, 0.0, p) - 1.0) < 1e-15);
  cd s = big_S(0.0, 0.2, 0.0, p);
  CHECK(s.real() == Approx(std::sqrt(0.96 / 0.92)).epsilon(1e-12));
  CHECK(std::abs(s.imag()) < 1e-15);
  CHECK(std::abs(big_S(1e3, 0.2, 0.0, p)) == Approx(std::sqrt(0.5)).epsilon(1e-5));
  CHECK_THROWS_AS(big_S(0.0, 1.0, 0.0, p), DomainError);
  // S^2 from the rational form
  for (double xi : {-3.0, 0.1, 2.0})
    for (double eta : {0.0, 0.7}) {
      cd w(xi, 0.2);
      cd k2 = w * w + eta * eta;
      cd S = big_S(xi, 0.2, eta, p);
      CHECK(std::abs(S * S - (1.0 + k2) / (1.0 + 2.0 * k2)) < 1e-13);
      CHECK(S.real() > 0);
    }
}

TEST_CASE("lambda_pm at the origin") {
  ModelParams p = with_alpha(make_params(1, 2, std::sqrt(2.0), 0.5), 0.2);
  auto [lp, lm] = lambda_pm(0.0, 0.0, p);
  CHECK(lm.real() == Approx(-0.078541).epsilon(1e-5));
  CHECK(lp.real() == Approx(-0.487145).epsilon(1e-5));
  double S0 = std::sqrt((1 - 0.04) / (1 - 0.08));
  CHECK(lm.real() == Approx(-0.2 * std::sqrt(2.0) + 0.2 * S0).epsilon(1e-13));
  CHECK(lm.real() <= -0.2 * (std::sqrt(2.0) - 1) / 2);
}

TEST_CASE("lambda_pm identities and the strip for lambda_plus") {
  ModelParams p = make_params(1, 2, 1.3, 0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50, 50);
  const cd I(0, 1);
  for (int k = 0; k < 10000; ++k) {
    double xi = u(rng), eta = u(rng);
    auto [lp, lm] = lambda_pm(xi, eta, p);
    cd w(xi, p.alpha);
    double sc = std::abs(lp) + std::abs(lm) + 1;
    CHECK(std::abs(lp + lm - 2.0 * I * p.c * w) <= 1e-12 * sc);
    CHECK(std::abs(lp - lm - 2.0 * I * mu(xi, p.alpha, eta) * big_S(xi, p.alpha, eta, p)) <= 1e-12 * sc);
    CHECK(lp.real() > -2 * p.alpha * p.c);
    CHECK(lp.real() <= -p.alpha * p.c * (1 - 1e-12));
  }
}

TEST_CASE("KP free symbol") {
  ModelParams p = make_params(1, 2, 1.05, 0.5);
  double beta0 = kp_beta0(0.4, p);
  CHECK(beta0 == Approx(0.168).epsilon(1e-12));
  CHECK(kp_free_symbol(1.0, 0.4, 0.0, p).real() == Approx(-0.768).epsilon(1e-12));
  CHECK(kp_free_symbol(1e-9, 0.4, 0.0, p).real() == Approx(-beta0).epsilon(1e-6));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int k = 0; k < 20000; ++k)
    CHECK(kp_free_symbol(u(rng), 0.4, u(rng), p).real() <= -beta0 * (1 - 1e-12));
}

TEST_CASE("sampled bound suites report no violations") {
  ModelParams p = with_alpha(make_params(1, 2, std::sqrt(2.0), 0.5), 0.2);
  BoundReport r = verify_symbol_bounds(p, 100000, 42);
  for (const char* name : {"im_mu", "cl_sf2", "cl_sf4", "cl_sf5", "im_mu_eta0", "sign_mu"}) {
    const BoundCheck* c = r.find(name);
    REQUIRE(c != nullptr);
    CHECK(c->samples > 0);
    CHECK_MESSAGE(c->violations == 0, name);
  }
}

TEST_CASE("symbol infimum of lambda_minus near c = 1") {
  ModelParams p = make_params(1, 2, 1.05, 0.5);
  BoundReport r = verify_symbol_bounds(p, 20000, 9);
  double ref = 2.0 / (p.alpha * (p.c - 1));
  // dense-grid oracle of sup 1/|lambda_minus|
  double sup = 0;
  for (int i = -20000; i <= 20000; ++i)
    for (double eta : {0.0, 1e-3, 1e-2, 0.05, 0.2}) {
      double xi = i * 1e-3;
      sup = std::max(sup, 1.0 / std::abs(lambda_pm(xi, eta, p).second));
    }
  CHECK(std::isfinite(r.sup_inv_minus_at_zero));
  CHECK(r.sup_inv_minus_at_zero <= 4 * ref);
  CHECK(r.sup_inv_minus_at_zero >= ref / 4);
  CHECK(r.sup_inv_minus_at_zero <= sup * (1 + 1e-9));
  CHECK(r.sup_inv_minus_at_zero >= 0.5 * sup);
}

TEST_CASE("reports are reproducible for a fixed seed") {
  ModelParams p = make_params(1, 2, 1.2, 0.5);
  BoundReport a = verify_symbol_bounds(p, 5000, 77), b = verify_symbol_bounds(p, 5000, 77);
  REQUIRE(a.checks.size() == b.checks.size());
  for (size_t i = 0; i < a.checks.size(); ++i)
    CHECK(a.checks[i].worst_margin == b.checks[i].worst_margin);
  CHECK_THROWS_AS(verify_symbol_bounds(p, 0, 1), DomainError);
}
