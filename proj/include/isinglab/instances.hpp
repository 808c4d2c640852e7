#pragma once

// Null and planted spiked-Wishart samplers and the projection coupling
// matrix built from the observations.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "isinglab/rng.hpp"

namespace isinglab {

namespace stream_tag {
// Fixed tags for substream derivation, so sampling is order-independent.
constexpr std::uint64_t spike = 0xA11CE;
constexpr std::uint64_t vectors = 0xB0B;
}  // namespace stream_tag

struct SpikedInstance {
  int n = 0;
  int N = 0;         // = ceil(n / gamma)
  double beta = 0.0; // 0 for null instances
  double gamma = 0.0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd ys;                   // n x N, one observation per column
  std::optional<Eigen::VectorXd> spike; // +-1 entries, present iff planted
};

struct ProjectionMatrix {
  Eigen::MatrixXd P; // symmetric n x n
  int rank = 0;      // dim of the orthogonal complement of span(ys)
  double tol = 0.0;  // relative rank cutoff used
};

struct CouplingMatrix {
  Eigen::MatrixXd J;           // symmetric n x n
  Eigen::VectorXd eigenvalues; // cached, descending

  static CouplingMatrix from_matrix(Eigen::MatrixXd m) {
    if (m.rows() != m.cols())
      throw std::invalid_argument("CouplingMatrix: matrix must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("CouplingMatrix: matrix must be symmetric");
    CouplingMatrix c;
    c.J = std::move(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.J, Eigen::EigenvaluesOnly);
    c.eigenvalues = es.eigenvalues().reverse(); // descending
    return c;
  }

  int n() const { return int(J.rows()); }
  double lambda_max() const { return eigenvalues(0); }
  double lambda_min() const { return eigenvalues(eigenvalues.size() - 1); }
  double spectral_width() const { return lambda_max() - lambda_min(); }
};

inline int num_observations(int n, double gamma) {
  return int(std::ceil(double(n) / gamma));
}

namespace detail {

inline Eigen::VectorXd gaussian_vector(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.gaussian();
  return v;
}

}  // namespace detail

// N = ceil(n/gamma) iid standard Gaussian observations. Each column is drawn
// from its own substream of (seed, column index).
inline SpikedInstance sample_null(int n, double gamma, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_null: n must be >= 2");
  if (!(gamma > 1.0)) throw std::invalid_argument("sample_null: gamma must be > 1");
  SpikedInstance inst;
  inst.n = n;
  inst.N = num_observations(n, gamma);
  inst.beta = 0.0;
  inst.gamma = gamma;
  inst.seed = seed;
  inst.ys.resize(n, inst.N);
  for (int j = 0; j < inst.N; ++j) {
    Rng rng(substream_seed(seed, stream_tag::vectors, std::uint64_t(j)));
    inst.ys.col(j) = detail::gaussian_vector(n, rng);
  }
  return inst;
}

// Planted model: x ~ Unif({+-1}^n), then y_j = z + a (x'z) x with
// a = (sqrt(1+beta) - 1)/n, which has covariance I + (beta/n) x x'.
inline SpikedInstance sample_planted(int n, double beta, double gamma,
                                     std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_planted: n must be >= 2");
  if (!(beta > -1.0 && beta <= 0.0))
    throw std::invalid_argument("sample_planted: beta must be in (-1, 0]");
  if (!(gamma > 1.0)) throw std::invalid_argument("sample_planted: gamma must be > 1");
  SpikedInstance inst;
  inst.n = n;
  inst.N = num_observations(n, gamma);
  inst.beta = beta;
  inst.gamma = gamma;
  inst.seed = seed;

  Rng spike_rng(substream_seed(seed, stream_tag::spike));
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = spike_rng.spin();
  inst.spike = x;

  const double a = (std::sqrt(1.0 + beta) - 1.0) / double(n);
  inst.ys.resize(n, inst.N);
  for (int j = 0; j < inst.N; ++j) {
    Rng rng(substream_seed(seed, stream_tag::vectors, std::uint64_t(j)));
    Eigen::VectorXd z = detail::gaussian_vector(n, rng);
    inst.ys.col(j) = z + a * x.dot(z) * x;
  }
  return inst;
}

// Orthogonal projection onto the orthogonal complement of span(ys):
// P = I - Q Q' with Q an orthonormal basis from column-pivoted QR. Singular
// directions below tol * (largest pivot) are treated as null.
inline ProjectionMatrix proj(const Eigen::MatrixXd& ys, double tol = 1e-10) {
  const int n = int(ys.rows());
  const int N = int(ys.cols());
  if (N < 1 || N >= n)
    throw std::invalid_argument("proj: need 1 <= N < n");
  if (ys.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("proj: all observations are zero");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ys);
  qr.setThreshold(tol);
  const int span_dim = int(qr.rank());
  Eigen::MatrixXd Q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, span_dim);

  ProjectionMatrix pm;
  pm.P = Eigen::MatrixXd::Identity(n, n) - Q * Q.transpose();
  pm.P = 0.5 * (pm.P + pm.P.transpose()); // enforce exact symmetry
  pm.rank = n - span_dim;
  pm.tol = tol;
  return pm;
}

// J = eta * proj(ys), with eigenvalues cached.
inline CouplingMatrix coupling_from_instance(const SpikedInstance& inst,
                                             double eta) {
  if (!(eta >= 0.0))
    throw std::invalid_argument("coupling_from_instance: eta must be >= 0");
  const ProjectionMatrix pm = proj(inst.ys);
  return CouplingMatrix::from_matrix(eta * pm.P);
}

}  // namespace isinglab
