#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blsw/errors.hpp"
#include "blsw/params.hpp"
#include "oracles.hpp"

using namespace blsw;
using doctest::Approx;

TEST_CASE("make_params derived constants") {
  ModelParams p = make_params(1, 2, std::sqrt(2.0), 0.5);
  CHECK(p.alpha_c == Approx(0.577350).epsilon(1e-6));
  CHECK(p.alpha_c_prime == Approx(std::sqrt((std::sqrt(2.0) - 1) / (2 * std::sqrt(2.0) - 1))).epsilon(1e-14));
  // the quoted reference values are rounded loosely in the sixth digit
  CHECK(p.alpha_c_prime == Approx(0.475955).epsilon(5e-5));
  CHECK(p.alpha == Approx(0.237978).epsilon(5e-5));
  CHECK(p.eps * p.eps == Approx(1.0).epsilon(1e-15));
  CHECK(p.alpha < p.alpha_c_prime);
  CHECK(p.alpha_c_prime <= p.alpha_c);
  for (double c : {1.001, 1.05, 1.3, 2.0, 3.0}) {
    ModelParams q = make_params(0.5, 1.0, c, 0.9);
    CHECK(q.eps * q.eps == Approx(c * c - 1).epsilon(1e-14));
    CHECK(q.alpha_c_prime <= q.alpha_c);
  }
}

TEST_CASE("make_params rejects inadmissible input") {
  CHECK_THROWS_AS(make_params(1, 2, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(make_params(2, 1, std::sqrt(2.0), 0.5), DomainError);
  CHECK_THROWS_AS(make_params(1, 2, 1.2, 0.0), DomainError);
  CHECK_THROWS_AS(make_params(1, 2, 1.2, 1.0), DomainError);
  CHECK_THROWS_AS(make_params(1, 1, 1.2, 0.5), DomainError);
}

TEST_CASE("profile values and symmetry") {
  ModelParams p = make_params(1, 2, std::sqrt(2.0), 0.5);
  ProfileBundle b0 = eval_profile(p, 0.0);
  CHECK(b0.q == Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(b0.qp == 0.0);
  CHECK(eval_profile(p, 40.0).q < 1e-9);
  for (double x : {0.3, 1.7, 5.0, 12.0}) {
    ProfileBundle l = eval_profile(p, -x), r = eval_profile(p, x);
    CHECK(l.q == Approx(r.q).epsilon(1e-14));
    CHECK(l.qp == Approx(-r.qp).epsilon(1e-14));
    CHECK(r.q == Approx(oracle::q(p.a, p.b, p.c, x)).epsilon(1e-13));
    CHECK(r.r == Approx(-p.c * r.q).epsilon(1e-14));
  }
}

TEST_CASE("profile solves the traveling-wave ODE") {
  for (double c : {1.05, 1.2, std::sqrt(2.0), 2.5}) {
    ModelParams p = make_params(1, 2, c, 0.5);
    double scale = eval_profile(p, 0).q * (c * c - 1);
    for (double x = -20; x <= 20; x += 0.37) {
      ProfileBundle b = eval_profile(p, x);
      double res = (p.b * c * c - p.a) * b.qpp - (c * c - 1) * b.q + 1.5 * c * b.q * b.q;
      CHECK(std::abs(res) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("derivatives against finite differences") {
  ModelParams p = make_params(1, 2, 1.2, 0.5);
  const double h = 1e-5;
  for (double x : {-3.0, -0.4, 0.8, 4.0}) {
    ProfileBundle b = eval_profile(p, x);
    double qp = (oracle::q(1, 2, 1.2, x + h) - oracle::q(1, 2, 1.2, x - h)) / (2 * h);
    CHECK(b.qp == Approx(qp).epsilon(1e-8));
    double dqdc = (oracle::q(1, 2, 1.2 + h, x) - oracle::q(1, 2, 1.2 - h, x)) / (2 * h);
    CHECK(b.dq_dc == Approx(dqdc).epsilon(1e-8));
    // phi' = q
    double dphi = (eval_profile(p, x + h).phi - eval_profile(p, x - h).phi) / (2 * h);
    CHECK(dphi == Approx(b.q).epsilon(1e-8));
    double dac = (make_params(1, 2, 1.2 + h, 0.5).alpha_c - make_params(1, 2, 1.2 - h, 0.5).alpha_c) / (2 * h);
    CHECK(alpha_c_dc(p) == Approx(dac).epsilon(1e-8));
  }
}

TEST_CASE("tail and head integrals of dq/dc") {
  ModelParams p = make_params(1, 2, 1.2, 0.5);
  for (double x : {-2.0, 0.0, 1.5}) {
    double tail = oracle::simpson([&](double s) { return eval_profile(p, s).dq_dc; }, x, x + 200, 40000);
    double head = oracle::simpson([&](double s) { return eval_profile(p, s).dq_dc; }, x - 200, x, 40000);
    CHECK(eval_profile(p, x).tail_int == Approx(tail).epsilon(1e-7));
    CHECK(eval_profile(p, x).head_int == Approx(head).epsilon(1e-7));
  }
}

TEST_CASE("closed-form integrals") {
  ModelParams p = make_params(1, 2, std::sqrt(2.0), 0.5);
  ProfileIntegrals I = closed_form_integrals(p);
  CHECK(I.I2 == Approx(2.309401).epsilon(1e-6));
  CHECK(I.I1 == Approx(4.898979).epsilon(1e-6));
  CHECK(I.I3 == Approx(0.153960).epsilon(1e-5));
  auto o = oracle::profile_integrals(1, 2, std::sqrt(2.0));
  CHECK(I.I1 == Approx(o[0]).epsilon(1e-10));
  CHECK(I.I2 == Approx(o[1]).epsilon(1e-10));
  CHECK(I.I3 == Approx(o[2]).epsilon(1e-10));
  ProfileIntegrals Q = quadrature_integrals(p);
  CHECK(Q.I1 == Approx(I.I1).epsilon(1e-10));
  CHECK(Q.I2 == Approx(I.I2).epsilon(1e-10));
  CHECK(Q.I3 == Approx(I.I3).epsilon(1e-10));
}

TEST_CASE("energy and its speed derivative") {
  ModelParams p = make_params(1, 2, std::sqrt(2.0), 0.5);
  CHECK(energy_and_derivative(p).E == Approx(7.698004).epsilon(1e-6));
  for (double c = 1.01; c <= 3.0; c += 0.05)
    CHECK(energy_and_derivative(make_params(1, 2, c, 0.5)).dE_dc > 0);
  const double h = 1e-5;
  double fd = (oracle::energy(1, 2, 1.2 + h) - oracle::energy(1, 2, 1.2 - h)) / (2 * h);
  CHECK(energy_and_derivative(make_params(1, 2, 1.2, 0.5)).dE_dc == Approx(fd).epsilon(1e-6));
}

TEST_CASE("weighted tail helpers") {
  ModelParams p = make_params(1, 2, 1.1, 0.5);
  double L = tail_half_length(p);
  CHECK(L == Approx(std::min(40 / (p.alpha_c - p.alpha), 400.0)));
  CHECK(weighted_tail_ratio(p, L) < 1e-10);
  CHECK(weighted_tail_ratio(p, 5.0) > 1e-10);
}
