#pragma once

namespace blsw {

struct ModelParams {
  double a = 1.0;
  double b = 2.0;
  double c = 1.05;
  double eps = 0.0;            // sqrt(c^2 - 1)
  double alpha = 0.0;          // weight exponent
  double alpha_c = 0.0;        // profile decay rate
  double alpha_c_prime = 0.0;  // upper limit for alpha
  double alpha_hat0 = 0.0;     // (b - a)^(-1/2)
  double alpha_fraction = 0.5;
};

ModelParams make_params(double a, double b, double c, double alpha_fraction);
// Same parameters with an explicit weight 0 < alpha < alpha_c.
ModelParams with_alpha(ModelParams p, double alpha);

// d(alpha_c)/dc.
double alpha_c_dc(const ModelParams& p);
// Weight in the long-wave variable z_hat = eps z.
inline double alpha_hat(const ModelParams& p) { return p.alpha / p.eps; }

struct ProfileBundle {
  double phi = 0, q = 0, qp = 0, qpp = 0;
  double r = 0, rp = 0;
  double dq_dc = 0, dr_dc = 0;
  double tail_int = 0;  // int_x^inf dq/dc
  double head_int = 0;  // int_-inf^x dq/dc
};

ProfileBundle eval_profile(const ModelParams& p, double x);

struct ProfileIntegrals {
  double I1 = 0;  // int q
  double I2 = 0;  // int q^2
  double I3 = 0;  // int q'^2
};

ProfileIntegrals closed_form_integrals(const ModelParams& p);
// Adaptive Gauss-Kronrod over [-L, L] with L = tail_half_length.
ProfileIntegrals quadrature_integrals(const ModelParams& p);

struct Energy {
  double E = 0;
  double dE_dc = 0;
};

Energy energy_and_derivative(const ModelParams& p);

// min(40 / (alpha_c - alpha), 400).
double tail_half_length(const ModelParams& p);
// q(L) e^{alpha L} / q(0).
double weighted_tail_ratio(const ModelParams& p, double L);

}  // namespace blsw
