#pragma once

// Brute-force ground truth: exact partition sums by Gray-code enumeration,
// full Gibbs tables, overlap-resolved sums, total variation distance, and a
// Monte Carlo estimate of the spherical pressure.

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "isinglab/instances.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/util.hpp"

namespace isinglab {

constexpr int kExactEnumerationCap = 24; // 16.7M states
constexpr int kGibbsTableCap = 20;       // 1M doubles

struct ExactSummary {
  int n = 0;
  double log_Z = 0.0;
  double log_Zhat = 0.0; // log_Z - n log 2
  double pressure = 0.0; // log_Zhat / n
};

struct GibbsTable {
  std::vector<double> probabilities; // indexed by configuration bitmask
};

struct OverlapProfile {
  Eigen::VectorXd reference;
  // Entry r: log of the sum of exp(x'Jx/2) over configurations agreeing with
  // the reference in exactly r coordinates.
  std::vector<double> log_sums;
};

namespace detail {

// Visits all 2^n configurations in Gray-code order, maintaining the energy
// E(x) = x'Jx/2 with an O(n) update per step. Bit b of the mask set means
// x_b = +1; the walk starts at the all -1 configuration.
// visit(mask, energy, flipped_bit) is called for every state; flipped_bit is
// -1 for the initial state.
template <typename Visit>
void enumerate_energies(const CouplingMatrix& J, Visit visit) {
  const int n = J.n();
  if (n < 1 || n > kExactEnumerationCap)
    throw std::invalid_argument("enumerate_energies: n exceeds enumeration cap");
  const Eigen::MatrixXd& M = J.J;

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, -1.0);
  // Local fields excluding the diagonal: h_i = sum_{j != i} J_ij x_j.
  Eigen::VectorXd h = M * x - M.diagonal().cwiseProduct(x);
  double energy = 0.5 * x.dot(M * x);

  const std::uint64_t total = std::uint64_t(1) << n;
  std::uint64_t mask = 0;
  visit(mask, energy, -1);
  for (std::uint64_t i = 1; i < total; ++i) {
    const int b = std::countr_zero(i); // Gray code flips bit ctz(i) at step i
    energy += -2.0 * x(b) * h(b);
    const double delta = -2.0 * x(b);
    h += delta * M.col(b);
    h(b) -= delta * M(b, b);
    x(b) = -x(b);
    mask ^= std::uint64_t(1) << b;
    visit(mask, energy, b);
  }
}

}  // namespace detail

inline ExactSummary exact_summary(const CouplingMatrix& J) {
  LogSumExpAcc acc;
  detail::enumerate_energies(
      J, [&](std::uint64_t, double e, int) { acc.add(e); });
  ExactSummary s;
  s.n = J.n();
  s.log_Z = acc.log_sum();
  s.log_Zhat = s.log_Z - double(s.n) * std::numbers::ln2;
  s.pressure = s.log_Zhat / double(s.n);
  return s;
}

inline GibbsTable gibbs_table(const CouplingMatrix& J) {
  const int n = J.n();
  if (n > kGibbsTableCap)
    throw std::invalid_argument("gibbs_table: n exceeds table cap");
  GibbsTable t;
  t.probabilities.assign(std::size_t(1) << n, 0.0);
  LogSumExpAcc acc;
  detail::enumerate_energies(J, [&](std::uint64_t mask, double e, int) {
    t.probabilities[mask] = e;
    acc.add(e);
  });
  const double log_Z = acc.log_sum();
  for (double& p : t.probabilities) p = std::exp(p - log_Z);
  return t;
}

inline OverlapProfile overlap_profile(const CouplingMatrix& J,
                                      const Eigen::VectorXd& reference) {
  const int n = J.n();
  if (int(reference.size()) != n)
    throw std::invalid_argument("overlap_profile: reference dimension mismatch");
  std::vector<LogSumExpAcc> accs(n + 1);
  // Agreement count of the all -1 start with the reference.
  int r0 = 0;
  for (int i = 0; i < n; ++i)
    if (reference(i) < 0.0) ++r0;
  int r = r0;
  detail::enumerate_energies(J, [&](std::uint64_t mask, double e, int bit) {
    if (bit >= 0) {
      const bool now_plus = (mask >> bit) & 1;
      const bool ref_plus = reference(bit) > 0.0;
      r += (now_plus == ref_plus) ? 1 : -1;
    }
    accs[r].add(e);
  });
  OverlapProfile p;
  p.reference = reference;
  p.log_sums.reserve(n + 1);
  for (auto& a : accs) p.log_sums.push_back(a.log_sum());
  return p;
}

// TV(a, b) = (1/2) sum |a_i - b_i|.
inline double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("tv_distance: length mismatch");
  double sa = 0.0, sb = 0.0, d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    d += std::abs(a[i] - b[i]);
  }
  if (std::abs(sa - 1.0) > 1e-6 || std::abs(sb - 1.0) > 1e-6)
    throw std::invalid_argument("tv_distance: inputs must sum to 1");
  return 0.5 * d;
}

struct McEstimate {
  double estimate = 0.0;
  double stderr_est = 0.0;
};

// Monte Carlo estimate of p^S(J) = (1/n) log E exp((1/2) sum lambda_i x_i^2)
// over the sphere of radius sqrt(n). Squared sphere coordinates are sampled
// as n * Dirichlet(1/2, ..., 1/2) weights, realized as normalized squared
// Gaussians. The standard error comes from 10 batch estimates.
inline McEstimate spherical_pressure_mc(const CouplingMatrix& J, int samples,
                                        std::uint64_t seed) {
  if (samples < 1000)
    throw std::invalid_argument("spherical_pressure_mc: samples must be >= 1000");
  const int n = J.n();
  constexpr int kBatches = 10;
  Rng rng(substream_seed(seed, std::uint64_t(0x5B)));

  LogSumExpAcc all;
  std::vector<LogSumExpAcc> batch(kBatches);
  for (int s = 0; s < samples; ++s) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gaussian();
      const double g2 = g * g;
      num += J.eigenvalues(i) * g2;
      den += g2;
    }
    const double v = 0.5 * double(n) * num / den; // (1/2) sum lambda_i x_i^2
    all.add(v);
    batch[s % kBatches].add(v);
  }
  std::vector<double> batch_est;
  batch_est.reserve(kBatches);
  for (auto& b : batch)
    if (b.count() > 0) batch_est.push_back(b.log_mean() / double(n));
  McEstimate est;
  est.estimate = all.log_mean() / double(n);
  est.stderr_est = sample_sd(batch_est) / std::sqrt(double(batch_est.size()));
  return est;
}

}  // namespace isinglab
