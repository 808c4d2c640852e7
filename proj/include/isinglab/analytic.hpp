#pragma once

// Closed-form constants of the planted/null free-energy comparison and the
// spherical-model upper bound on the Ising pressure, plus the one-dimensional
// optimizers (grid + golden section, bisection) used to evaluate them.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace isinglab {

struct ModelParams {
  double eta;    // inverse temperature, > 0
  double beta;   // spike strength, in (-1, 0]
  double gamma;  // aspect ratio n/N, > 1

  void validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("ModelParams: eta must be > 0");
    if (!(beta > -1.0 && beta <= 0.0))
      throw std::invalid_argument("ModelParams: beta must be in (-1, 0]");
    if (!(gamma > 1.0)) throw std::invalid_argument("ModelParams: gamma must be > 1");
  }
};

struct AnalyticReport {
  ModelParams params{};
  double epsilon = 0.0;          // overlap loss eps(beta, gamma)
  double c_p = 0.0;              // planted constant, ideal (no -eps*eta correction)
  double c_p_corrected = 0.0;    // c_p - eps*eta
  double c_q = 0.0;              // null constant
  double delta = 0.0;            // (c_p - c_q) / 6
  double threshold = 0.0;        // c = (c_p + c_q) / 2
  double x_star = 0.0;           // argmax of f_eta over [0, 1]
  double sup_f = 0.0;            // sup_x f_eta(x) = c_p - c_q
  bool epsilon_vacuous = false;  // eps >= 1: the planted lower bound says nothing
};

struct SphericalBoundResult {
  double value = 0.0;   // the bound on p^S
  double s_star = 0.0;  // minimizing s, > lambda_max / 2
  bool converged = false;
};

// H(x) = -x log x - (1-x) log(1-x), natural log, 0*log(0) := 0.
inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("binary_entropy: x must be in [0, 1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log(x);
  if (x < 1.0) h -= (1.0 - x) * std::log(1.0 - x);
  return h;
}

// f_eta(x) = H(x) + 2 eta x^2 - 2 eta x + (1/2) log(eta) + 1/2 - log(2).
inline double f_eta(double eta, double x) {
  if (!(eta > 0.0)) throw std::domain_error("f_eta: eta must be > 0");
  return binary_entropy(x) + 2.0 * eta * x * x - 2.0 * eta * x +
         0.5 * std::log(eta) + 0.5 - std::numbers::ln2;
}

// Inflection point x0(eta) = (1 + sqrt(1 - 1/eta)) / 2, defined for eta >= 1.
inline double x0(double eta) {
  if (!(eta >= 1.0)) throw std::domain_error("x0: eta must be >= 1");
  return 0.5 * (1.0 + std::sqrt(1.0 - 1.0 / eta));
}

// g(theta) = 2 theta / (1 - theta^2) - log((1 + theta) / (1 - theta)).
inline double g_theta(double theta) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw std::domain_error("g_theta: theta must be in [0, 1)");
  return 2.0 * theta / (1.0 - theta * theta) -
         std::log((1.0 + theta) / (1.0 - theta));
}

// g'(theta) = 4 theta^2 / (1 - theta^2)^2.
inline double g_theta_deriv(double theta) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw std::domain_error("g_theta_deriv: theta must be in [0, 1)");
  const double d = 1.0 - theta * theta;
  return 4.0 * theta * theta / (d * d);
}

struct SupResult {
  double x_star;
  double value;
};

namespace detail {

// Golden-section maximization of fn on [lo, hi] to bracket width `tol`.
template <typename Fn>
double golden_section_max(Fn fn, double lo, double hi, double tol) {
  constexpr double invphi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

// Bisection for the unique root of a strictly increasing function on (lo, hi).
template <typename Fn>
bool bisect_root(Fn fn, double lo, double hi, double tol, int max_iter,
                 double& root) {
  double flo = fn(lo), fhi = fn(hi);
  if (!(flo < 0.0 && fhi > 0.0)) return false;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  root = 0.5 * (lo + hi);
  return hi - lo <= tol;
}

}  // namespace detail

// Global maximum of f_eta over [0, 1]. f_eta is symmetric about 1/2, so the
// search runs on [1/2, 1]: a dense grid brackets the (at most two) local
// maxima, then golden section refines. For eta <= 1 the maximizer is 1/2.
inline SupResult sup_f(double eta) {
  if (!(eta > 0.0)) throw std::domain_error("sup_f: eta must be > 0");
  if (eta <= 1.0) return {0.5, f_eta(eta, 0.5)};
  constexpr int kGrid = 10000;
  double best_x = 0.5, best_v = f_eta(eta, 0.5);
  for (int i = 0; i <= kGrid; ++i) {
    const double x = 0.5 + 0.5 * double(i) / kGrid;
    const double v = f_eta(eta, x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double step = 0.5 / kGrid;
  const double lo = std::max(0.5, best_x - step);
  const double hi = std::min(1.0, best_x + step);
  const double xs =
      detail::golden_section_max([eta](double x) { return f_eta(eta, x); }, lo,
                                 hi, 1e-12);
  const double vs = f_eta(eta, xs);
  if (vs >= best_v) return {xs, vs};
  return {best_x, best_v};
}

// eps(beta, gamma) = sqrt(2 (1 + beta)) / (sqrt(gamma) - 1). Defined for
// beta >= -1 (vanishes at beta = -1) and gamma > 1.
inline double epsilon_overlap_loss(double beta, double gamma) {
  if (!(beta >= -1.0)) throw std::domain_error("epsilon: beta must be >= -1");
  if (!(gamma > 1.0)) throw std::domain_error("epsilon: gamma must be > 1");
  return std::sqrt(2.0 * (1.0 + beta)) / (std::sqrt(gamma) - 1.0);
}

// c_Q(eta) = eta/2 - 1/2 - (1/2) log(eta).
inline double c_q_value(double eta) {
  if (!(eta > 0.0)) throw std::domain_error("c_q_value: eta must be > 0");
  return 0.5 * eta - 0.5 - 0.5 * std::log(eta);
}

// c_P(eta) = eta/2 - log 2 + sup_x { H(x) + 2 eta x^2 - 2 eta x }, ideal
// (without the -eps*eta correction).
inline double c_p_value(double eta) {
  const SupResult s = sup_f(eta);
  // f_eta = brace + (1/2) log(eta) + 1/2 - log 2, so undo the constant.
  const double brace = s.value - 0.5 * std::log(eta) - 0.5 + std::numbers::ln2;
  return 0.5 * eta - std::numbers::ln2 + brace;
}

inline AnalyticReport constants(const ModelParams& params) {
  params.validate();
  AnalyticReport r;
  r.params = params;
  r.epsilon = epsilon_overlap_loss(params.beta, params.gamma);
  r.epsilon_vacuous = r.epsilon >= 1.0;
  const SupResult s = sup_f(params.eta);
  r.x_star = s.x_star;
  r.sup_f = s.value;
  r.c_q = c_q_value(params.eta);
  r.c_p = r.c_q + s.value;  // algebraic identity c_P - c_Q = sup f_eta
  r.c_p_corrected = r.c_p - r.epsilon * params.eta;
  r.delta = (r.c_p - r.c_q) / 6.0;
  r.threshold = 0.5 * (r.c_p + r.c_q);
  return r;
}

// inf over s > lambda_max/2 of
//   s - (1 + log 2)/2 - (1/(2n)) sum_i log(s - lambda_i/2).
// The derivative 1 - (1/(2n)) sum_i 1/(s - lambda_i/2) increases strictly
// from -inf to 1 on the domain, so the stationary point is unique and found
// by bisection.
inline SphericalBoundResult spherical_bound(std::span<const double> eigenvalues) {
  if (eigenvalues.empty())
    throw std::invalid_argument("spherical_bound: empty eigenvalue list");
  const double n = double(eigenvalues.size());
  double lam_max = eigenvalues[0], abs_max = 0.0;
  for (double l : eigenvalues) {
    lam_max = std::max(lam_max, l);
    abs_max = std::max(abs_max, std::abs(l));
  }
  const auto deriv = [&](double s) {
    double acc = 0.0;
    for (double l : eigenvalues) acc += 1.0 / (s - 0.5 * l);
    return 1.0 - acc / (2.0 * n);
  };
  const double lo = 0.5 * lam_max + 1e-12;
  const double hi = 0.5 * lam_max + n + abs_max;
  SphericalBoundResult res;
  res.converged = detail::bisect_root(deriv, lo, hi, 1e-12, 200, res.s_star);
  if (!res.converged)
    throw std::runtime_error("spherical_bound: bisection did not converge");
  double logsum = 0.0;
  for (double l : eigenvalues) logsum += std::log(res.s_star - 0.5 * l);
  res.value = res.s_star - 0.5 * (1.0 + std::numbers::ln2) - logsum / (2.0 * n);
  return res;
}

// Spherical bound for the spectrum of eta * (rank rho*n projection), in the
// n -> infinity limit: a rho fraction of eigenvalues equal eta, the rest 0.
inline SphericalBoundResult projection_spherical_bound(double eta, double rho) {
  if (!(eta > 0.0)) throw std::domain_error("projection_spherical_bound: eta must be > 0");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::domain_error("projection_spherical_bound: rho must be in (0, 1)");
  const auto deriv = [&](double s) {
    return 1.0 - 0.5 * rho / (s - 0.5 * eta) - 0.5 * (1.0 - rho) / s;
  };
  const double lo = 0.5 * eta + 1e-14;
  const double hi = 0.5 * eta + 1.0 + eta;
  SphericalBoundResult res;
  res.converged = detail::bisect_root(deriv, lo, hi, 1e-13, 200, res.s_star);
  if (!res.converged)
    throw std::runtime_error("projection_spherical_bound: bisection did not converge");
  res.value = res.s_star - 0.5 * (1.0 + std::numbers::ln2) -
              0.5 * rho * std::log(res.s_star - 0.5 * eta) -
              0.5 * (1.0 - rho) * std::log(res.s_star);
  return res;
}

// Largest gamma on the grid gamma = 1 + 2^-k, k = 0..30, whose projection
// spherical bound (rho = 1 - 1/gamma) is <= c_Q(eta) + delta/2. The bound
// tightens toward c_Q as gamma -> 1+, so the search walks k upward.
inline double choose_gamma(double eta, double delta) {
  if (!(eta > 1.0)) throw std::domain_error("choose_gamma: eta must be > 1");
  if (!(delta > 0.0)) throw std::domain_error("choose_gamma: delta must be > 0");
  const double target = c_q_value(eta) + 0.5 * delta;
  for (int k = 0; k <= 30; ++k) {
    const double gamma = 1.0 + std::ldexp(1.0, -k);
    const double rho = 1.0 - 1.0 / gamma;
    if (projection_spherical_bound(eta, rho).value <= target) return gamma;
  }
  throw std::runtime_error("choose_gamma: no gamma in (1, 2] satisfies the bound");
}

}  // namespace isinglab
