#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blsw/linop.hpp"
#include "blsw/resonance.hpp"

namespace blsw {

// exp(t M) applied through the eigenbasis, or scaling and squaring when the
// eigenbasis is ill-conditioned.
class Propagator {
 public:
  explicit Propagator(const OperatorMatrix& M, double max_condition = 1e8);
  StatePair apply(const StatePair& s0, double t) const;
  bool uses_eigenbasis() const { return eig_; }
  double condition() const { return cond_; }
  const Eigen::VectorXcd& eigenvalues() const { return values_; }
  const Eigen::MatrixXcd& right() const { return V_; }
  const Eigen::MatrixXcd& left() const { return W_; }

 private:
  Eigen::MatrixXd M_;
  Eigen::VectorXcd values_;
  Eigen::MatrixXcd V_, W_;
  bool eig_ = false;
  double cond_ = 0;
};

std::vector<StatePair> evolve_mode(const OperatorMatrix& M, const StatePair& state0,
                                   const std::vector<double>& times);

// (c1, c2) = (<state, g1*>, <state, g2*>).
Eigen::Vector2cd project_resonant(const ResonantBasis& rb, const Grid1D& g,
                                  const StatePair& state);
Eigen::Vector2cd project_resonant(const ModelParams& p, const Grid1D& g, double eta,
                                  const StatePair& state);
StatePair resonant_part(const ResonantBasis& rb, const Grid1D& g, const StatePair& state);

struct ModeCoefficients {
  double eta = 0;
  cd lambda = 0;
  double kappa = 0;
  Eigen::Matrix2d A;
  std::vector<double> times;
  std::vector<Eigen::Vector2cd> c;
  std::vector<double> e;  // |kappa c1|^2 + |c2|^2
};

ModeCoefficients track_modes(const ModelParams& p, const Grid1D& g, double eta,
                             const StatePair& state0, const std::vector<double>& times);

// Multiplier exp(-l2 eta^2 t) sin(l1 eta t) / (k1 eta).
double modulation_multiplier(double eta, double t, double lambda1, double lambda2,
                             double kappa1);
// Box of half-width l1 t and height 1/(2 k1) smoothed by the heat kernel.
double modulation_kernel(double y, double t, double lambda1, double lambda2,
                         double kappa1);

struct YGrid {
  double half_length = 0;
  int m = 0;
  double dy = 0;
  Eigen::VectorXd nodes;        // y_j = -L + j dy
  Eigen::VectorXd wavenumbers;  // FFT order
};

YGrid build_ygrid(double half_length, int m);

// H_t * W_t * f on the y grid through the y-Fourier transform; constants
// default to the closed-form values.
Eigen::VectorXd modulation_prediction(const ModelParams& p, const YGrid& yg,
                                      const Eigen::VectorXd& f, double t);
Eigen::VectorXd modulation_prediction(const YGrid& yg, const Eigen::VectorXd& f,
                                      double t, double lambda1, double lambda2,
                                      double kappa1);

struct Field2D {
  Grid1D z_grid;
  YGrid y_grid;
  Eigen::MatrixXcd phi, psi;  // n x m, conjugated in z
};

// Seeded band-limited noise localized on the wave, in conjugated coordinates.
StatePair noise_state(const ModelParams& p, const Grid1D& zg, unsigned seed);

// Named initial data: gaussian-phase-bump, kernel-mode, projected-noise.
Field2D make_field(const ModelParams& p, const Grid1D& zg, const YGrid& yg,
                   const std::string& preset, unsigned seed = 1,
                   double y_width = 10.0);

// f(y) = <(Phi0, Psi0)(., y), zeta2*>.
Eigen::VectorXd modulation_source(const ModelParams& p, const Field2D& field);

struct EvolutionRecord {
  std::vector<double> times;
  std::vector<double> residual;  // max_y |(dz Phi, Psi) - P(y,t) (q', r')|_{L2_alpha}
  std::vector<double> norm_X;    // max_y of the X norm
  std::vector<double> prediction_boundary;  // |P| at the y boundary / max |P|
  double decay_slope = 0;        // log residual vs log t on the fit window
  double fit_t0 = 0, fit_t1 = 0;
  std::vector<Field2D> snapshots;
};

struct EvolveOptions {
  int threads = 1;
  double fit_t0 = 50, fit_t1 = 800;
  bool keep_snapshots = false;
};

EvolutionRecord evolve_field(const ModelParams& p, const Field2D& field0,
                             const std::vector<double>& times,
                             const EvolveOptions& opt = {});

// t_k = t0 r^k for k = 0..count-1
std::vector<double> geometric_times(double t0, double t1, int count);

struct DecayResult {
  double rate = 0;
  double resonant_content = 0;  // max |c_k| of the initial state
  bool projected = false;
  std::vector<double> times, norms;
};

// Removes the resonant part of state at eta.
StatePair project_out_resonant(const ResonantBasis& rb, const Grid1D& g,
                               const StatePair& state);

DecayResult offresonant_decay(const ModelParams& p, const Grid1D& g, double eta0,
                              const StatePair& state0, const std::vector<double>& times);

}  // namespace blsw
