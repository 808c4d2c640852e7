#pragma once

// Discrete-time single-site heat-bath Glauber dynamics with cached local
// fields, the exact single-update transition kernel for small n, and
// empirical mixing diagnostics against the exact Gibbs table.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "isinglab/ising_exact.hpp"
#include "isinglab/rng.hpp"

namespace isinglab {

constexpr int kKernelCap = 12;

enum class ScanOrder { random, systematic };

// P(x_i = +1 | rest) = 1 / (1 + exp(-2 h_i)); the diagonal of J cancels and
// is excluded from h.
inline double conditional_prob_plus(double h) {
  return 1.0 / (1.0 + std::exp(-2.0 * h));
}

struct GlauberState {
  Eigen::VectorXd x;      // +-1 spins
  Eigen::VectorXd fields; // h_i = sum_{j != i} J_ij x_j
  long sweep_count = 0;
  Rng rng;

  explicit GlauberState(std::uint64_t seed) : rng(seed) {}
};

namespace detail {

inline Eigen::VectorXd local_fields(const Eigen::MatrixXd& J,
                                    const Eigen::VectorXd& x) {
  return J * x - J.diagonal().cwiseProduct(x);
}

inline void heat_bath_update(GlauberState& s, const Eigen::MatrixXd& J, int i) {
  const double p = conditional_prob_plus(s.fields(i));
  const double next = (s.rng.uniform() < p) ? 1.0 : -1.0;
  const double delta = next - s.x(i);
  if (delta != 0.0) {
    s.fields += delta * J.col(i);
    s.fields(i) -= delta * J(i, i);
    s.x(i) = next;
  }
}

}  // namespace detail

inline GlauberState make_state(const Eigen::MatrixXd& J, std::uint64_t seed) {
  const int n = int(J.rows());
  GlauberState s(seed);
  s.x.resize(n);
  for (int i = 0; i < n; ++i) s.x(i) = s.rng.spin();
  s.fields = detail::local_fields(J, s.x);
  return s;
}

// One sweep = n heat-bath updates. Random scan draws n iid uniform sites;
// systematic scan visits 0..n-1 in order (exactly uniform after one sweep
// when J = 0). The field cache is recomputed every 1000 sweeps.
inline void sweep(GlauberState& s, const Eigen::MatrixXd& J,
                  ScanOrder order = ScanOrder::random) {
  const int n = int(J.rows());
  if (s.sweep_count % 1000 == 0 && s.sweep_count > 0)
    s.fields = detail::local_fields(J, s.x);
  if (order == ScanOrder::random) {
    for (int k = 0; k < n; ++k)
      detail::heat_bath_update(s, J, int(s.rng.uniform_index(std::uint64_t(n))));
  } else {
    for (int i = 0; i < n; ++i) detail::heat_bath_update(s, J, i);
  }
  ++s.sweep_count;
}

// State after `sweeps` random-scan sweeps from a uniform random start.
inline Eigen::VectorXd sample(const CouplingMatrix& J, long sweeps,
                              std::uint64_t seed) {
  if (sweeps < 1) throw std::invalid_argument("sample: sweeps must be >= 1");
  GlauberState s = make_state(J.J, seed);
  for (long t = 0; t < sweeps; ++t) sweep(s, J.J);
  return s.x;
}

struct KernelCheck {
  double stationarity_residual = 0.0;    // max_y |(mu K)(y) - mu(y)|
  double detailed_balance_residual = 0.0; // max |mu(x)K(x,y) - mu(y)K(y,x)|
};

namespace detail {

// Flip probabilities K(x, x^i) * n for the random-scan single-update kernel,
// for every state and site: entry [mask * n + i] = P(resample at i flips).
inline std::vector<double> flip_probabilities(const CouplingMatrix& J) {
  const int n = J.n();
  const std::size_t total = std::size_t(1) << n;
  std::vector<double> fp(total * std::size_t(n));
  Eigen::VectorXd x(n);
  for (std::size_t mask = 0; mask < total; ++mask) {
    for (int i = 0; i < n; ++i) x(i) = ((mask >> i) & 1) ? 1.0 : -1.0;
    const Eigen::VectorXd h = local_fields(J.J, x);
    for (int i = 0; i < n; ++i) {
      const double p_plus = conditional_prob_plus(h(i));
      fp[mask * std::size_t(n) + i] = (x(i) > 0.0) ? 1.0 - p_plus : p_plus;
    }
  }
  return fp;
}

}  // namespace detail

// Builds the exact 2^n-state random-scan kernel and checks stationarity of
// the Gibbs measure and detailed balance entrywise.
inline KernelCheck exact_kernel_stationarity(const CouplingMatrix& J) {
  const int n = J.n();
  if (n > kKernelCap)
    throw std::invalid_argument("exact_kernel_stationarity: n exceeds kernel cap");
  const std::vector<double> mu = gibbs_table(J).probabilities;
  const std::vector<double> fp = detail::flip_probabilities(J);
  const std::size_t total = std::size_t(1) << n;

  KernelCheck res;
  for (std::size_t y = 0; y < total; ++y) {
    double stay = 1.0, in_flow = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t xi = y ^ (std::size_t(1) << i);
      const double k_y_to_xi = fp[y * std::size_t(n) + i] / double(n);
      const double k_xi_to_y = fp[xi * std::size_t(n) + i] / double(n);
      stay -= k_y_to_xi;
      in_flow += mu[xi] * k_xi_to_y;
      const double db = std::abs(mu[y] * k_y_to_xi - mu[xi] * k_xi_to_y);
      res.detailed_balance_residual = std::max(res.detailed_balance_residual, db);
    }
    const double st = std::abs(mu[y] * stay + in_flow - mu[y]);
    res.stationarity_residual = std::max(res.stationarity_residual, st);
  }
  return res;
}

struct MixingReport {
  int n = 0;
  double eta_width = 0.0; // lambda_max - lambda_min
  long sweeps = 0;
  double tv_estimate = 0.0;
  std::string method; // "exact-kernel" or "empirical-histogram"
};

// Evolves the exact distribution of the chain from the uniform start through
// `sweeps` sweeps of the random-scan kernel and reports TV to the Gibbs
// measure. Deterministic; n <= 12.
inline MixingReport mixing_report_exact_kernel(const CouplingMatrix& J,
                                               long sweeps) {
  const int n = J.n();
  if (n > kKernelCap)
    throw std::invalid_argument("mixing_report_exact_kernel: n exceeds kernel cap");
  const std::vector<double> mu = gibbs_table(J).probabilities;
  const std::vector<double> fp = detail::flip_probabilities(J);
  const std::size_t total = std::size_t(1) << n;

  std::vector<double> nu(total, 1.0 / double(total)), next(total);
  for (long t = 0; t < sweeps * long(n); ++t) {
    for (std::size_t y = 0; y < total; ++y) {
      double stay = 1.0, in_flow = 0.0;
      for (int i = 0; i < n; ++i) {
        const std::size_t xi = y ^ (std::size_t(1) << i);
        stay -= fp[y * std::size_t(n) + i] / double(n);
        in_flow += nu[xi] * fp[xi * std::size_t(n) + i] / double(n);
      }
      next[y] = nu[y] * stay + in_flow;
    }
    nu.swap(next);
  }
  MixingReport r;
  r.n = n;
  r.eta_width = J.spectral_width();
  r.sweeps = sweeps;
  r.tv_estimate = tv_distance(nu, mu);
  r.method = "exact-kernel";
  return r;
}

// Histogram of `samples` draws from one long chain (burn-in then spaced
// samples) against the exact Gibbs table. Defaults: burn-in 10n sweeps,
// spacing n sweeps.
inline MixingReport mixing_report_empirical(const CouplingMatrix& J,
                                            long samples, std::uint64_t seed,
                                            long burn_in_sweeps = -1,
                                            long spacing_sweeps = -1) {
  const int n = J.n();
  if (n > kGibbsTableCap)
    throw std::invalid_argument("mixing_report_empirical: n exceeds table cap");
  if (samples < 1)
    throw std::invalid_argument("mixing_report_empirical: samples must be >= 1");
  if (burn_in_sweeps < 0) burn_in_sweeps = 10L * n;
  if (spacing_sweeps < 0) spacing_sweeps = n;

  const std::vector<double> mu = gibbs_table(J).probabilities;
  std::vector<double> hist(mu.size(), 0.0);
  GlauberState s = make_state(J.J, seed);
  for (long t = 0; t < burn_in_sweeps; ++t) sweep(s, J.J);
  for (long k = 0; k < samples; ++k) {
    for (long t = 0; t < spacing_sweeps; ++t) sweep(s, J.J);
    std::size_t mask = 0;
    for (int i = 0; i < n; ++i)
      if (s.x(i) > 0.0) mask |= std::size_t(1) << i;
    hist[mask] += 1.0;
  }
  for (double& c : hist) c /= double(samples);

  MixingReport r;
  r.n = n;
  r.eta_width = J.spectral_width();
  r.sweeps = burn_in_sweeps + samples * spacing_sweeps;
  r.tv_estimate = tv_distance(hist, mu);
  r.method = "empirical-histogram";
  return r;
}

}  // namespace isinglab
