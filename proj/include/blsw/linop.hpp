#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "blsw/grid.hpp"
#include "blsw/params.hpp"

namespace blsw {

using cd = std::complex<double>;

// Stacked (Phi, Psi) in conjugated coordinates w = e^{alpha z} u.
using StatePair = Eigen::VectorXcd;

// Profile samples feeding the potential terms.
struct Potentials {
  Eigen::VectorXd q, qp, r, rp;
};

Potentials sample_potentials(const ModelParams& p, const Grid1D& g);

// Matrix-free action of the conjugated operator at transverse wavenumber eta.
StatePair apply_L(const ModelParams& p, const Grid1D& g, double eta,
                  const StatePair& w, bool potentials = true);

// Real because every symbol has real coefficients (Nyquist symmetrized).
struct OperatorMatrix {
  double eta = 0;
  bool potentials = true;
  ModelParams params;
  Grid1D grid;
  Eigen::MatrixXd entries;
  Eigen::Index size() const { return entries.rows(); }
};

OperatorMatrix assemble_L(const ModelParams& p, const Grid1D& g, double eta,
                          bool potentials = true);

// dz * sum f_j conj(g_j)
cd pairing(const Grid1D& g, const Eigen::VectorXcd& f, const Eigen::VectorXcd& h);

// Eigenvalues with Re > re_threshold, sorted by Re descending.
std::vector<cd> spectrum_slice(const OperatorMatrix& M, double re_threshold);

struct EigenPairLR {
  cd lambda;
  Eigen::VectorXcd right;  // unit 2-norm
  Eigen::VectorXcd left;   // unit 2-norm, M^H left = conj(lambda) left
  double residual = 0;     // |(M - lambda) right| / |right|
  cd pairing;              // <right, left>
};

// Full decomposition; left vectors are the rows of V^{-1}.
struct DenseEigen {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd right;  // columns, unit norm
  Eigen::MatrixXcd left;   // columns w_k with w_k^H v_j = delta_jk
  double condition = 0;    // max_k |v_k| |w_k|
};

DenseEigen dense_eigen(const OperatorMatrix& M);

struct EigsNearOptions {
  int max_iter = 400;
  double tol = 1e-13;  // residual relative to max(1, |M|_1)
  unsigned seed = 7;
};

// k eigenpairs closest to target by shift-invert subspace iteration; falls
// back to the dense decomposition if the iteration stalls.
std::vector<EigenPairLR> eigs_near(const OperatorMatrix& M, cd target, int k,
                                   const EigsNearOptions& opt = {});

// Left vector for a known eigenvalue by inverse iteration on M^T.
Eigen::VectorXcd left_vector(const OperatorMatrix& M, cd lambda,
                             const Eigen::VectorXcd& right);

// 1/sigma_min(lambda - M) in the H^1 x L^2 frequency-weighted norm;
// +infinity when lambda - M is numerically singular.
double resolvent_norm_probe(const OperatorMatrix& M, cd lambda);

// Frequency weight sqrt(1 + xi_k^2 + eta^2) applied to the first component.
Eigen::VectorXcd to_weighted_frequency(const Grid1D& g, double eta,
                                       const StatePair& w);
Eigen::VectorXcd from_weighted_frequency(const Grid1D& g, double eta,
                                         const Eigen::VectorXcd& v);
// Discrete H^1_alpha x L^2_alpha norm of a conjugated state.
double x_norm(const Grid1D& g, double eta, const StatePair& w);

}  // namespace blsw
