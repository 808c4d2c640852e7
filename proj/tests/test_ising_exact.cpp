#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "isinglab/analytic.hpp"
#include "isinglab/ising_exact.hpp"
#include "isinglab/util.hpp"
#include "test_helpers.hpp"

using namespace isinglab;

namespace {

// Independent oracle: direct evaluation of x'Jx/2 for every bitmask.
double naive_log_Z(const Eigen::MatrixXd& J) {
  const int n = int(J.rows());
  LogSumExpAcc acc;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = ((mask >> i) & 1) ? 1.0 : -1.0;
    acc.add(0.5 * x.dot(J * x));
  }
  return acc.log_sum();
}

double log_binomial(int n, int r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

}  // namespace

TEST_CASE("exact summary closed forms") {
  SUBCASE("J = 0") {
    const auto J = CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(6, 6));
    const ExactSummary s = exact_summary(J);
    CHECK(s.log_Z == doctest::Approx(6.0 * std::numbers::ln2).epsilon(1e-13));
    CHECK(std::abs(s.pressure) < 1e-13);
  }
  SUBCASE("n = 2 coupling j gives pressure (1/2) log cosh j") {
    for (double j : {0.3, 1.0, -2.0}) {
      Eigen::MatrixXd m(2, 2);
      m << 0, j, j, 0;
      const ExactSummary s = exact_summary(CouplingMatrix::from_matrix(m));
      CHECK(s.pressure ==
            doctest::Approx(0.5 * std::log(std::cosh(j))).epsilon(1e-12));
    }
  }
  SUBCASE("diagonal coupling shifts log_Z by half the trace") {
    Eigen::VectorXd d(5);
    d << 0.4, -1.2, 2.0, 0.0, 0.7;
    const auto J = CouplingMatrix::from_matrix(d.asDiagonal().toDenseMatrix());
    const ExactSummary s = exact_summary(J);
    CHECK(s.log_Z ==
          doctest::Approx(5.0 * std::numbers::ln2 + 0.5 * d.sum()).epsilon(1e-12));
  }
  SUBCASE("summary fields are mutually consistent") {
    Rng rng(5);
    const CouplingMatrix J = testing::random_coupling(7, 1.5, rng);
    const ExactSummary s = exact_summary(J);
    CHECK(std::abs(s.log_Zhat - (s.log_Z - 7.0 * std::numbers::ln2)) < 1e-12);
    CHECK(std::abs(s.pressure - s.log_Zhat / 7.0) < 1e-12);
  }
  SUBCASE("size cap") {
    CHECK_THROWS_AS(exact_summary(CouplingMatrix::from_matrix(
                        Eigen::MatrixXd::Zero(25, 25))),
                    std::invalid_argument);
  }
}

TEST_CASE("Gray-code enumeration matches naive re-evaluation") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + int(rng.uniform_index(9)); // n <= 10
    const CouplingMatrix J = testing::random_coupling(n, 2.0, rng);
    const ExactSummary s = exact_summary(J);
    CHECK(std::abs(s.log_Z - naive_log_Z(J.J)) < 1e-10);
  }
}

TEST_CASE("pressure shift invariance under J + cI") {
  Rng rng(88);
  for (double c : {0.5, -1.3, 3.0}) {
    const CouplingMatrix J = testing::random_coupling(8, 1.2, rng);
    const CouplingMatrix Jc = CouplingMatrix::from_matrix(
        J.J + c * Eigen::MatrixXd::Identity(8, 8));
    CHECK(exact_summary(Jc).pressure ==
          doctest::Approx(exact_summary(J).pressure + c / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("gibbs table") {
  SUBCASE("J = 0 is uniform") {
    const auto J = CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(5, 5));
    const GibbsTable t = gibbs_table(J);
    for (double p : t.probabilities)
      CHECK(p == doctest::Approx(1.0 / 32.0).epsilon(1e-13));
  }
  SUBCASE("n = 1 gives (1/2, 1/2)") {
    const auto J = CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(1, 1));
    const GibbsTable t = gibbs_table(J);
    REQUIRE(t.probabilities.size() == 2);
    CHECK(t.probabilities[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.probabilities[1] == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("invariant under J + cI") {
    Rng rng(3);
    const CouplingMatrix J = testing::random_coupling(6, 1.0, rng);
    const CouplingMatrix Jc = CouplingMatrix::from_matrix(
        J.J + 2.7 * Eigen::MatrixXd::Identity(6, 6));
    const GibbsTable a = gibbs_table(J), b = gibbs_table(Jc);
    for (std::size_t i = 0; i < a.probabilities.size(); ++i)
      CHECK(std::abs(a.probabilities[i] - b.probabilities[i]) < 1e-12);
  }
  SUBCASE("normalization and per-entry weights") {
    Rng rng(4);
    const CouplingMatrix J = testing::random_coupling(6, 1.4, rng);
    const GibbsTable t = gibbs_table(J);
    double total = 0.0;
    for (double p : t.probabilities) total += p;
    CHECK(std::abs(total - 1.0) < 1e-10);
    const double log_Z = exact_summary(J).log_Z;
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
      Eigen::VectorXd x(6);
      for (int i = 0; i < 6; ++i) x(i) = ((mask >> i) & 1) ? 1.0 : -1.0;
      const double expected = std::exp(0.5 * x.dot(J.J * x) - log_Z);
      CHECK(t.probabilities[mask] ==
            doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("overlap profile") {
  SUBCASE("J = 0 counts binomially") {
    const int n = 8;
    const auto J = CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(n, n));
    const Eigen::VectorXd ref = Eigen::VectorXd::Ones(n);
    const OverlapProfile p = overlap_profile(J, ref);
    REQUIRE(int(p.log_sums.size()) == n + 1);
    for (int r = 0; r <= n; ++r)
      CHECK(p.log_sums[r] == doctest::Approx(log_binomial(n, r)).epsilon(1e-10));
  }
  SUBCASE("global flip reverses the profile") {
    Rng rng(12);
    const CouplingMatrix J = testing::random_coupling(7, 1.1, rng);
    Eigen::VectorXd ref(7);
    for (int i = 0; i < 7; ++i) ref(i) = rng.spin();
    const OverlapProfile a = overlap_profile(J, ref);
    const OverlapProfile b = overlap_profile(J, (-ref).eval());
    for (int r = 0; r <= 7; ++r)
      CHECK(a.log_sums[r] == doctest::Approx(b.log_sums[7 - r]).epsilon(1e-10));
  }
  SUBCASE("log-sum-exp over entries recovers log_Z") {
    Rng rng(13);
    const CouplingMatrix J = testing::random_coupling(9, 1.3, rng);
    Eigen::VectorXd ref(9);
    for (int i = 0; i < 9; ++i) ref(i) = rng.spin();
    const OverlapProfile p = overlap_profile(J, ref);
    CHECK(log_sum_exp(p.log_sums) ==
          doctest::Approx(exact_summary(J).log_Z).epsilon(1e-10));
  }
  SUBCASE("dimension mismatch") {
    const auto J = CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(4, 4));
    CHECK_THROWS_AS(overlap_profile(J, Eigen::VectorXd::Ones(5)),
                    std::invalid_argument);
  }
}

TEST_CASE("planted lower-bound chain step on small instances") {
  // On instances where ||P x||^2 >= (1 - eps^2) n holds,
  //   p(eta P) >= -log 2 - eps*eta + (1/n) log sum_r C(n,r) exp(eta (2r-n)^2 / (2n)).
  const int n = 12;
  const double beta = -0.9, gamma = 4.0, eta = 1.2;
  const double eps = epsilon_overlap_loss(beta, gamma);
  int checked = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SpikedInstance inst = sample_planted(n, beta, gamma, 2024 + s);
    const ProjectionMatrix pm = proj(inst.ys);
    if ((pm.P * *inst.spike).squaredNorm() < (1.0 - eps * eps) * n) continue;
    const CouplingMatrix J = CouplingMatrix::from_matrix(eta * pm.P);
    const double p = exact_summary(J).pressure;
    LogSumExpAcc acc;
    for (int r = 0; r <= n; ++r) {
      const double d = 2.0 * r - n;
      acc.add(std::lgamma(n + 1.0) - std::lgamma(r + 1.0) -
              std::lgamma(n - r + 1.0) + eta * d * d / (2.0 * n));
    }
    const double rhs = -std::numbers::ln2 - eps * eta + acc.log_sum() / n;
    CHECK(p >= rhs - 1e-12);
    ++checked;
  }
  CHECK(checked >= 8); // the retention event should hold for most seeds
}

TEST_CASE("tv distance") {
  const std::vector<double> u{0.5, 0.5}, v{0.75, 0.25};
  CHECK(tv_distance(u, u) == 0.0);
  CHECK(tv_distance(u, v) == doctest::Approx(0.25).epsilon(1e-15));
  const std::vector<double> a{1.0, 0.0}, b{0.0, 1.0};
  CHECK(tv_distance(a, b) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(tv_distance(u, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(tv_distance(u, std::vector<double>{0.2, 0.2}), std::invalid_argument);
}

TEST_CASE("spherical pressure Monte Carlo") {
  SUBCASE("J = 0 gives exactly 0") {
    const auto J = CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(6, 6));
    const McEstimate e = spherical_pressure_mc(J, 2000, 1);
    CHECK(e.estimate == 0.0);
  }
  SUBCASE("J = cI gives exactly c/2") {
    const double c = 1.7;
    const auto J = CouplingMatrix::from_matrix(
        (c * Eigen::MatrixXd::Identity(5, 5)).eval());
    const McEstimate e = spherical_pressure_mc(J, 2000, 2);
    CHECK(e.estimate == doctest::Approx(c / 2.0).epsilon(1e-12));
  }
  SUBCASE("rank-1 projection at n = 14: matches quadrature, below the bound") {
    Rng rng(31);
    const CouplingMatrix J = testing::random_projection_coupling(14, 1, 1.0, rng);
    const McEstimate e = spherical_pressure_mc(J, 200000, 3);
    // frozen from 1-d Beta(1/2, 13/2) quadrature of E exp(eta n w / 2)
    CHECK(std::abs(e.estimate - 0.06016567330383227) <= 4.0 * e.stderr_est);
    std::vector<double> eigs(J.eigenvalues.data(),
                             J.eigenvalues.data() + J.n());
    CHECK(e.estimate <= spherical_bound(eigs).value + 3.0 * e.stderr_est);
  }
  CHECK_THROWS_AS(
      spherical_pressure_mc(
          CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(3, 3)), 10, 1),
      std::invalid_argument);
}

TEST_CASE("pressure is eta-Lipschitz in the frame (Frobenius metric)") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6 + int(rng.uniform_index(7)); // n <= 12
    const int m = 1 + int(rng.uniform_index(std::uint64_t(n - 1)));
    const double eta = 0.5 + rng.uniform() * 1.5;
    const Eigen::MatrixXd U = testing::random_orthonormal(n, m, rng);
    const Eigen::MatrixXd V = testing::random_orthonormal(n, m, rng);
    const double pu = exact_summary(CouplingMatrix::from_matrix(
                                        eta * U * U.transpose()))
                          .pressure;
    const double pv = exact_summary(CouplingMatrix::from_matrix(
                                        eta * V * V.transpose()))
                          .pressure;
    CHECK(std::abs(pu - pv) <= eta * (U - V).norm() + 1e-12);
  }
}

TEST_CASE("spherical pressure dominates the Ising pressure on average") {
  // Orthogonally invariant J: Haar rank-2 projections scaled by 1.1.
  Rng rng(66);
  const int n = 10, draws = 100;
  std::vector<double> ps, ss;
  for (int d = 0; d < draws; ++d) {
    const CouplingMatrix J = testing::random_projection_coupling(n, 2, 1.1, rng);
    ps.push_back(exact_summary(J).pressure);
    ss.push_back(spherical_pressure_mc(J, 4000, 100 + d).estimate);
  }
  const double se = std::sqrt(
      sample_sd(ps) * sample_sd(ps) / draws + sample_sd(ss) * sample_sd(ss) / draws);
  CHECK(mean(ps) <= mean(ss) + 3.0 * se);
}
