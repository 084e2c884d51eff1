#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "blsw/grid.hpp"
#include "blsw/linop.hpp"
#include "blsw/params.hpp"

namespace blsw {

// Generalized kernel of L(0) and of its adjoint. Right vectors carry the
// e^{alpha z} factor, adjoint vectors the e^{-alpha z} factor.
struct ZetaQuadruple {
  StatePair zeta1, zeta2, zeta1_star, zeta2_star;
};

ZetaQuadruple zeta_quadruple(const ModelParams& p, const Grid1D& g);

// G(i, j) = <zeta_i, zeta_j^*>.
Eigen::Matrix2d pairing_matrix(const ZetaQuadruple& zq, const Grid1D& g);

struct NDValues {
  double n_val = 0, d_val = 0;
};

NDValues nd_polynomials(double a, double b, double c);
// d/drho of n and d as polynomials in rho = c^2.
NDValues nd_polynomials_drho(double a, double b, double rho);

struct ClosedFormConstants {
  double lambda1_0 = 0;
  double lambda2_0 = 0;
  double kappa1 = 0;
  double G11 = 0;         // <zeta1, zeta1*> = <zeta2, zeta2*> = dE/dc / 2
  double G21 = 0;         // <zeta2, zeta1*>
  double L1_pairing = 0;  // <L1(0) zeta1, zeta2*>
};

ClosedFormConstants closed_form_constants(const ModelParams& p);

// <L1(0) zeta1, zeta2*> with L1(0) assembled from multipliers on the grid.
double l1_pairing_numeric(const ModelParams& p, const Grid1D& g);
// L1(0) applied to a conjugated state.
StatePair apply_L1_0(const ModelParams& p, const Grid1D& g, const StatePair& w);

struct CurveFit {
  double lambda1 = 0, lambda3 = 0, lambda2 = 0;
  double lambda2_quartic = 0;  // Re = -l2 eta^2 + l4 eta^4 on the same window
  double residual_im = 0, residual_re = 0;  // rms misfit on the fitted window
  int points = 0;
};

struct EigenCurve {
  std::vector<double> etas;  // ascending
  std::vector<cd> lambdas;
  std::vector<double> residuals;
  std::vector<StatePair> vectors;  // filled when requested
  CurveFit fit;
};

struct CurveOptions {
  int threads = 1;
  bool keep_vectors = false;
  double min_step_fraction = 1.0 / 1024.0;  // of eta_max
};

// Continuation of the resonant eigenvalue from eta = 0 over |eta| <= eta_max.
EigenCurve resonant_curve(const ModelParams& p, const Grid1D& g, double eta_max,
                          int n_eta, const CurveOptions& opt = {});

// Least squares Im = l1 eta + l3 eta^3 and Re = -l2 eta^2 over |eta| <= window.
CurveFit fit_curve(const std::vector<double>& etas, const std::vector<cd>& lambdas,
                   double window);

// Normalized resonant pair at eta and the real basis built from it.
struct ResonantBasis {
  double eta = 0;
  cd lambda = 0;
  double kappa = 0;
  StatePair zeta, zeta_star;  // eigen / adjoint vector at +eta
  StatePair g, g_star;
  StatePair g1, g2, g1_star, g2_star;
  double residual = 0;
  bool jordan = false;  // eta == 0
  double jordan_g22 = 1;
  Eigen::Matrix2d A() const;
};

// Resonant eigenpair nearest to guess (closed-form asymptotics by default).
ResonantBasis resonant_basis(const ModelParams& p, const Grid1D& g, double eta);
ResonantBasis resonant_basis(const ModelParams& p, const Grid1D& g,
                             const OperatorMatrix& M, cd guess);

}  // namespace blsw
