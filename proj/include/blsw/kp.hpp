#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "blsw/params.hpp"

namespace blsw {

struct KPConstants {
  double gamma1 = 0;         // 4 sqrt((b - a) / 3)
  double alpha_hat0 = 0;     // (b - a)^(-1/2)
  double lambda1_limit = 0;  // 1 / sqrt(3)
  double lambda2_limit = 0;  // 2 / (3 alpha_hat0)
};

KPConstants kp_constants(const ModelParams& p);

// i eta / sqrt(3) * sqrt(1 + i gamma1 eta), principal branch.
std::complex<double> lambda_kp(double eta, const ModelParams& p);

struct KPModeValues {
  std::complex<double> g01, g02, g01_star, g02_star;
};

// Regularized modes; defined for every eta.
KPModeValues kp_modes_at(double eta, const ModelParams& p, double x);

// Eigenmode and adjoint mode at eta != 0.
std::pair<std::complex<double>, std::complex<double>> kp_singular_pair_at(
    double eta, const ModelParams& p, double x);

struct KPModes {
  Eigen::VectorXcd g0, g0_star;  // empty at eta = 0
  Eigen::VectorXcd g01, g02, g01_star, g02_star;
};

KPModes kp_modes(double eta, const ModelParams& p, const Eigen::VectorXd& x);

// int f conj(h) dx over the real line by adaptive quadrature.
std::complex<double> kp_pairing(double eta, const ModelParams& p, int j, int k);
// int g0(eta) conj(g0*(s eta)) dx for s = +1 or -1.
std::complex<double> kp_singular_pairing(double eta, const ModelParams& p, int s);

struct KPStudyOptions {
  int n = 512;
  double tail_decades = 36.0;  // L = tail_decades / alpha
  double alpha_fraction = 0.5;
  int n_eta = 9;
  int threads = 1;
};

struct KPRow {
  double eps = 0;
  double c = 0;
  std::complex<double> scaled_lambda;  // eps^-3 lambda_eps(eps^2 eta)
  std::complex<double> kp_lambda;
  double error = 0;
  double residual = 0;
};

std::vector<KPRow> kp_convergence_study(double a, double b,
                                        const std::vector<double>& eps_list,
                                        double eta, const KPStudyOptions& opt = {});

}  // namespace blsw
