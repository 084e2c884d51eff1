#include "blsw/linop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "blsw/errors.hpp"

namespace blsw {

namespace {

struct Symbols {
  Eigen::VectorXcd D, lap, K, Binv;
};

// Conjugated symbols at transverse wavenumber eta; w = xi + i alpha.
Symbols make_symbols(const ModelParams& p, const Grid1D& g, double eta) {
  const cd I(0, 1);
  const double e2 = eta * eta;
  Symbols s;
  s.D = symbol_values(g, [&](cd w) { return I * w; }, g.alpha);
  s.lap = symbol_values(g, [&](cd w) { return -w * w - e2; }, g.alpha);
  s.K = symbol_values(
      g,
      [&](cd w) {
        cd k2 = w * w + e2;
        return -(1.0 + p.a * k2) / (1.0 + p.b * k2) * k2;
      },
      g.alpha);
  s.Binv = symbol_values(
      g, [&](cd w) { return 1.0 / (1.0 + p.b * (w * w + e2)); }, g.alpha);
  return s;
}

// Dense real circulant with the given symbol.
Eigen::MatrixXd circulant(const Eigen::VectorXcd& values) {
  const Eigen::Index n = values.size();
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
  e0[0] = 1.0;
  Eigen::VectorXd col = apply_symbol(values, e0).real();
  Eigen::MatrixXd C(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) C(i, j) = col[(i - j + n) % n];
  return C;
}

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& X) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(X);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(X.rows(), X.cols());
}

Eigen::MatrixXcd random_block(Eigen::Index rows, Eigen::Index cols,
                              unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd X(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) X(i, j) = cd(nd(rng), nd(rng));
  return X;
}

double one_norm(const Eigen::MatrixXd& A) {
  return A.cwiseAbs().colwise().sum().maxCoeff();
}

EigenPairLR make_pair(const OperatorMatrix& M, cd lambda,
                      Eigen::VectorXcd right) {
  EigenPairLR e;
  e.lambda = lambda;
  right.normalize();
  e.right = right;
  Eigen::VectorXcd r = M.entries * right - lambda * right;
  e.residual = r.norm();
  e.left = left_vector(M, lambda, right);
  e.pairing = pairing(M.grid, e.right, e.left);
  return e;
}

}  // namespace

Potentials sample_potentials(const ModelParams& p, const Grid1D& g) {
  Potentials v;
  v.q.resize(g.n);
  v.qp.resize(g.n);
  v.r.resize(g.n);
  v.rp.resize(g.n);
  for (int j = 0; j < g.n; ++j) {
    auto pb = eval_profile(p, g.nodes[j]);
    v.q[j] = pb.q;
    v.qp[j] = pb.qp;
    v.r[j] = pb.r;
    v.rp[j] = pb.rp;
  }
  return v;
}

StatePair apply_L(const ModelParams& p, const Grid1D& g, double eta,
                  const StatePair& w, bool potentials) {
  const int n = g.n;
  Symbols s = make_symbols(p, g, eta);
  Eigen::VectorXcd u1 = w.head(n), u2 = w.tail(n);
  Eigen::VectorXcd d1 = apply_symbol(s.D, u1), d2 = apply_symbol(s.D, u2);
  StatePair out(2 * n);
  out.head(n) = p.c * d1 + u2;
  out.tail(n) = apply_symbol(s.K, u1) + p.c * d2;
  if (potentials) {
    Potentials v = sample_potentials(p, g);
    Eigen::VectorXcd l1 = apply_symbol(s.lap, u1);
    Eigen::VectorXcd inner = 2.0 * v.rp.cwiseProduct(d1) + v.r.cwiseProduct(l1) +
                             2.0 * v.q.cwiseProduct(d2) + v.qp.cwiseProduct(u2);
    out.tail(n) -= apply_symbol(s.Binv, inner);
  }
  return out;
}

OperatorMatrix assemble_L(const ModelParams& p, const Grid1D& g, double eta,
                          bool potentials) {
  const int n = g.n;
  Symbols s = make_symbols(p, g, eta);
  Eigen::MatrixXd D = circulant(s.D);
  OperatorMatrix M;
  M.eta = eta;
  M.potentials = potentials;
  M.params = p;
  M.grid = g;
  M.entries.resize(2 * n, 2 * n);
  M.entries.topLeftCorner(n, n) = p.c * D;
  M.entries.topRightCorner(n, n).setIdentity();
  M.entries.bottomLeftCorner(n, n) = circulant(s.K);
  M.entries.bottomRightCorner(n, n) = p.c * D;
  if (potentials) {
    Potentials v = sample_potentials(p, g);
    Eigen::MatrixXd Binv = circulant(s.Binv);
    Eigen::MatrixXd lap = circulant(s.lap);
    Eigen::MatrixXd v1 = 2.0 * v.rp.asDiagonal() * D;
    v1.noalias() += v.r.asDiagonal() * lap;
    Eigen::MatrixXd v2 = 2.0 * v.q.asDiagonal() * D;
    v2.diagonal() += v.qp;
    M.entries.bottomLeftCorner(n, n).noalias() -= Binv * v1;
    M.entries.bottomRightCorner(n, n).noalias() -= Binv * v2;
  }
  return M;
}

cd pairing(const Grid1D& g, const Eigen::VectorXcd& f, const Eigen::VectorXcd& h) {
  // Eigen's dot conjugates its first argument
  return g.dz * h.dot(f);
}

std::vector<cd> spectrum_slice(const OperatorMatrix& M, double re_threshold) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M.entries, false);
  if (es.info() != Eigen::Success)
    throw EigFailure("dense eigenvalue iteration did not converge");
  std::vector<cd> out;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()[k].real() > re_threshold)
      out.push_back(es.eigenvalues()[k]);
  std::sort(out.begin(), out.end(),
            [](cd x, cd y) { return x.real() > y.real(); });
  return out;
}

DenseEigen dense_eigen(const OperatorMatrix& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M.entries, true);
  if (es.info() != Eigen::Success)
    throw EigFailure("dense eigendecomposition did not converge");
  DenseEigen d;
  d.values = es.eigenvalues();
  d.right = es.eigenvectors();
  for (Eigen::Index k = 0; k < d.right.cols(); ++k) d.right.col(k).normalize();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(d.right);
  d.left = lu.inverse().adjoint();
  d.condition = 0;
  for (Eigen::Index k = 0; k < d.right.cols(); ++k)
    d.condition = std::max(d.condition, d.left.col(k).norm());
  if (!std::isfinite(d.condition)) d.condition = std::numeric_limits<double>::infinity();
  return d;
}

Eigen::VectorXcd left_vector(const OperatorMatrix& M, cd lambda,
                             const Eigen::VectorXcd& right) {
  const Eigen::Index N = M.size();
  Eigen::MatrixXcd A = M.entries.cast<cd>();
  A.diagonal().array() -= lambda;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  // x = conj(left) solves (M - lambda)^T x = 0
  Eigen::VectorXcd x = right.conjugate() + 1e-3 * random_block(N, 1, 11).col(0);
  x.normalize();
  for (int it = 0; it < 4; ++it) {
    Eigen::VectorXcd y = lu.transpose().solve(x);
    if (!y.allFinite()) break;
    x = y.normalized();
  }
  return x.conjugate();
}

std::vector<EigenPairLR> eigs_near(const OperatorMatrix& M, cd target, int k,
                                   const EigsNearOptions& opt) {
  const Eigen::Index N = M.size();
  if (k < 1 || k > N) throw DomainError("eigs_near needs 1 <= k <= N");
  const double tol = opt.tol * std::max(1.0, one_norm(M.entries));

  Eigen::MatrixXcd A = M.entries.cast<cd>();
  A.diagonal().array() -= target;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);

  Eigen::Index p = std::min<Eigen::Index>(N, std::max(2 * k + 8, 16));
  Eigen::MatrixXcd X = orthonormalize(random_block(N, p, opt.seed));
  for (int attempt = 0; attempt < 3; ++attempt) {
    for (int it = 0; it < opt.max_iter; ++it) {
      Eigen::MatrixXcd Y = lu.solve(X);
      if (!Y.allFinite()) {
        // target is an eigenvalue to working precision
        A.diagonal().array() -= 1e-12 * std::max(1.0, std::abs(target));
        lu.compute(A);
        Y = lu.solve(X);
      }
      Eigen::MatrixXcd Q = orthonormalize(Y);
      Eigen::MatrixXcd MQ = M.entries * Q;
      Eigen::MatrixXcd H = Q.adjoint() * MQ;
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(H);
      if (ces.info() != Eigen::Success) break;
      std::vector<Eigen::Index> idx(p);
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](auto i, auto j) {
        return std::abs(ces.eigenvalues()[i] - target) <
               std::abs(ces.eigenvalues()[j] - target);
      });
      Eigen::MatrixXcd U(p, p);
      Eigen::VectorXcd theta(p);
      for (Eigen::Index j = 0; j < p; ++j) {
        U.col(j) = ces.eigenvectors().col(idx[j]).normalized();
        theta[j] = ces.eigenvalues()[idx[j]];
      }
      Eigen::MatrixXcd ritz = Q * U;
      bool done = true;
      for (int j = 0; j < k && done; ++j)
        done = (MQ * U.col(j) - theta[j] * ritz.col(j)).norm() <= tol;
      if (done) {
        std::vector<EigenPairLR> out;
        for (int j = 0; j < k; ++j)
          out.push_back(make_pair(M, theta[j], ritz.col(j)));
        return out;
      }
      X = ritz;
    }
    if (p == N) break;
    Eigen::Index p2 = std::min(N, 2 * p);
    Eigen::MatrixXcd X2(N, p2);
    X2 << X, random_block(N, p2 - p, opt.seed + attempt + 1);
    X = orthonormalize(X2);
    p = p2;
  }

  // dense fallback
  DenseEigen d = dense_eigen(M);
  std::vector<Eigen::Index> idx(d.values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) {
    return std::abs(d.values[i] - target) < std::abs(d.values[j] - target);
  });
  std::vector<EigenPairLR> out;
  for (int j = 0; j < k; ++j) {
    auto e = make_pair(M, d.values[idx[j]], d.right.col(idx[j]));
    if (!(e.residual <= 1e-8))
      throw EigFailure("eigenpair residual " + std::to_string(e.residual) +
                       " exceeds 1e-8");
    out.push_back(std::move(e));
  }
  return out;
}

Eigen::VectorXcd to_weighted_frequency(const Grid1D& g, double eta,
                                       const StatePair& w) {
  const int n = g.n;
  Eigen::VectorXcd v(2 * n);
  v.head(n) = unitary_fft(w.head(n));
  v.tail(n) = unitary_fft(w.tail(n));
  for (int k = 0; k < n; ++k)
    v[k] *= std::sqrt(1.0 + g.wavenumbers[k] * g.wavenumbers[k] + eta * eta);
  return v;
}

Eigen::VectorXcd from_weighted_frequency(const Grid1D& g, double eta,
                                         const Eigen::VectorXcd& v) {
  const int n = g.n;
  Eigen::VectorXcd h = v.head(n);
  for (int k = 0; k < n; ++k)
    h[k] /= std::sqrt(1.0 + g.wavenumbers[k] * g.wavenumbers[k] + eta * eta);
  StatePair w(2 * n);
  w.head(n) = unitary_ifft(h);
  w.tail(n) = unitary_ifft(v.tail(n));
  return w;
}

double x_norm(const Grid1D& g, double eta, const StatePair& w) {
  return std::sqrt(g.dz) * to_weighted_frequency(g, eta, w).norm();
}

double resolvent_norm_probe(const OperatorMatrix& M, cd lambda) {
  const Grid1D& g = M.grid;
  const double eta = M.eta;
  const int n = g.n;
  Eigen::MatrixXcd A = M.entries.cast<cd>();
  A.diagonal().array() -= lambda;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double inf = std::numeric_limits<double>::infinity();
  if (!(lu.rcond() > 1e-300)) return inf;

  Eigen::VectorXd W(n);
  for (int k = 0; k < n; ++k)
    W[k] = std::sqrt(1.0 + g.wavenumbers[k] * g.wavenumbers[k] + eta * eta);
  // G^H y and G^{-H} z for G = diag(W F, F)
  auto G_adj = [&](const Eigen::VectorXcd& y) {
    StatePair w(2 * n);
    w.head(n) = unitary_ifft(W.cwiseProduct(y.head(n)));
    w.tail(n) = unitary_ifft(y.tail(n));
    return w;
  };
  auto G_inv_adj = [&](const StatePair& z) {
    Eigen::VectorXcd v(2 * n);
    v.head(n) = unitary_fft(z.head(n)).cwiseQuotient(W);
    v.tail(n) = unitary_fft(z.tail(n));
    return v;
  };

  // power iteration on T^{-H} T^{-1}, T = G (M - lambda) G^{-1}
  Eigen::VectorXcd x = random_block(2 * n, 1, 5).col(0).normalized();
  double sigma = 0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXcd y = to_weighted_frequency(g, eta, lu.solve(from_weighted_frequency(g, eta, x)));
    Eigen::VectorXcd z = G_inv_adj(lu.adjoint().solve(G_adj(y)));
    if (!z.allFinite()) return inf;
    double s = std::sqrt(z.norm());
    x = z / z.norm();
    if (it > 5 && std::abs(s - sigma) <= 1e-12 * s) {
      sigma = s;
      break;
    }
    sigma = s;
  }
  return sigma;
}

}  // namespace blsw
