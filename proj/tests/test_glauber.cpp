#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "isinglab/glauber.hpp"
#include "isinglab/ising_exact.hpp"
#include "test_helpers.hpp"

using namespace isinglab;

TEST_CASE("conditional flip probability") {
  CHECK(conditional_prob_plus(0.0) == 0.5);
  // 1 / (1 + exp(-2))
  CHECK(conditional_prob_plus(1.0) ==
        doctest::Approx(0.8807970779778823).epsilon(1e-14));
  CHECK(conditional_prob_plus(-1.0) ==
        doctest::Approx(1.0 - 0.8807970779778823).epsilon(1e-14));
  CHECK(conditional_prob_plus(50.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sampling is deterministic in the seed") {
  Rng rng(2);
  const CouplingMatrix J = testing::random_coupling(8, 1.0, rng);
  const Eigen::VectorXd a = sample(J, 50, 17);
  const Eigen::VectorXd b = sample(J, 50, 17);
  CHECK(a == b);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(a(i)) == 1.0);
  CHECK_THROWS_AS(sample(J, 0, 17), std::invalid_argument);
}

TEST_CASE("cached fields stay consistent with the configuration") {
  Rng rng(9);
  const CouplingMatrix J = testing::random_coupling(10, 1.5, rng);
  GlauberState s = make_state(J.J, 4);
  for (int t = 0; t < 100; ++t) sweep(s, J.J);
  const Eigen::VectorXd fresh = detail::local_fields(J.J, s.x);
  CHECK((s.fields - fresh).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("at J = 0 one systematic sweep yields exact uniformity") {
  // Each site is resampled exactly once with p = 1/2, so the empirical
  // distribution over many independent chains should look uniform.
  const int n = 4;
  const Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> hist(1 << n, 0.0);
  const int chains = 200000;
  for (int c = 0; c < chains; ++c) {
    GlauberState s = make_state(J, 100000 + std::uint64_t(c));
    sweep(s, J, ScanOrder::systematic);
    std::size_t mask = 0;
    for (int i = 0; i < n; ++i)
      if (s.x(i) > 0.0) mask |= std::size_t(1) << i;
    hist[mask] += 1.0;
  }
  for (double& h : hist) h /= double(chains);
  const std::vector<double> uniform(1 << n, 1.0 / double(1 << n));
  CHECK(tv_distance(hist, uniform) < 0.02);
}

TEST_CASE("zero-field magnetization vanishes") {
  const Eigen::MatrixXd J = Eigen::MatrixXd::Zero(12, 12);
  GlauberState s = make_state(J, 11);
  double acc = 0.0;
  const int sweeps = 20000;
  for (int t = 0; t < sweeps; ++t) {
    sweep(s, J);
    acc += s.x.sum();
  }
  acc /= double(sweeps) * 12.0;
  CHECK(std::abs(acc) < 0.02);
}

TEST_CASE("exact kernel: Gibbs stationarity and detailed balance") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 + int(rng.uniform_index(6)); // n <= 8
    const CouplingMatrix J = testing::random_coupling(n, 1.8, rng);
    const KernelCheck k = exact_kernel_stationarity(J);
    CHECK(k.stationarity_residual <= 1e-12);
    CHECK(k.detailed_balance_residual <= 1e-12);
  }
  CHECK_THROWS_AS(exact_kernel_stationarity(CouplingMatrix::from_matrix(
                      Eigen::MatrixXd::Zero(13, 13))),
                  std::invalid_argument);
}

TEST_CASE("trajectories are invariant under diagonal shifts of J") {
  // h excludes the diagonal, so J and J + cI drive identical chains.
  Rng rng(33);
  const CouplingMatrix J = testing::random_coupling(9, 1.2, rng);
  const CouplingMatrix Jc = CouplingMatrix::from_matrix(
      J.J + 4.2 * Eigen::MatrixXd::Identity(9, 9));
  CHECK(sample(J, 200, 5) == sample(Jc, 200, 5));
}

TEST_CASE("exact-kernel mixing diagnostic") {
  SUBCASE("J = 0 mixes in one sweep worth of updates up to laziness") {
    const auto J = CouplingMatrix::from_matrix(Eigen::MatrixXd::Zero(6, 6));
    const MixingReport r = mixing_report_exact_kernel(J, 10);
    CHECK(r.method == "exact-kernel");
    CHECK(r.tv_estimate < 1e-6);
  }
  SUBCASE("TV after fixed sweeps is monotone in the spectral width") {
    Rng rng(41);
    Eigen::MatrixXd base = testing::gaussian_matrix(10, 10, rng);
    base = 0.5 * (base + base.transpose()).eval();
    const CouplingMatrix b = CouplingMatrix::from_matrix(base);
    const double w0 = b.spectral_width();
    double prev = -1.0;
    for (double width : {0.5, 0.9, 1.5, 3.0}) {
      const CouplingMatrix J =
          CouplingMatrix::from_matrix(base * (width / w0));
      const MixingReport r = mixing_report_exact_kernel(J, 5);
      CHECK(r.tv_estimate >= prev - 1e-9);
      CHECK(r.eta_width == doctest::Approx(width).epsilon(1e-10));
      prev = r.tv_estimate;
    }
  }
}

TEST_CASE("empirical histogram approaches the Gibbs table") {
  Rng rng(52);
  const CouplingMatrix J = testing::random_coupling(6, 0.9, rng);
  const MixingReport r = mixing_report_empirical(J, 200000, 7);
  CHECK(r.method == "empirical-histogram");
  CHECK(r.tv_estimate < 0.05);
  CHECK_THROWS_AS(mixing_report_empirical(J, 0, 7), std::invalid_argument);
}
