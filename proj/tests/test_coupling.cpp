#include <doctest.h>

#include <cmath>
#include <random>

#include "mtmc/coupling.hpp"
#include "oracles.hpp"

using namespace mtmc;

namespace {

TransitionMatrix two_state_kernel()
{
  return build_kernel(std::vector<double>{0.75, 0.25}, std::vector<double>{0.5, 0.5});
}

} // namespace

TEST_CASE("overlap mass equals one minus TV")
{
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 10);
    const auto p = oracle::dyadic_distribution(gen, n);
    const auto q = oracle::dyadic_distribution(gen, n);
    CHECK(1.0 - overlap_mass(p, q) == oracle::half_l1(p, q));
    const auto r = oracle::random_distribution(gen, n, 0.0);
    const auto s = oracle::random_distribution(gen, n, 0.0);
    CHECK(std::abs(1.0 - overlap_mass(r, s) - oracle::half_l1(r, s)) < 1e-14);
  }
}

TEST_CASE("maximal coupling: identical and disjoint inputs")
{
  RngStream rng(2);
  const std::vector<double> m{0.2, 0.5, 0.3};
  for (int i = 0; i < 1000; ++i) {
    const auto d = maximal_coupling_draw(rng, m, m);
    CHECK(d.coalesced);
    CHECK(d.x_next == d.y_next);
  }
  const std::vector<double> left{0.5, 0.5, 0.0, 0.0};
  const std::vector<double> right{0.0, 0.0, 0.4, 0.6};
  for (int i = 0; i < 1000; ++i) {
    const auto d = maximal_coupling_draw(rng, left, right);
    CHECK_FALSE(d.coalesced);
    CHECK(d.x_next < 2);
    CHECK(d.y_next >= 2);
  }
}

TEST_CASE("maximal coupling frequency and marginals")
{
  RngStream rng(17);
  const std::vector<double> m1{0.5, 0.5};
  const std::vector<double> m2{0.75, 0.25};
  const int draws = 100000;
  int equal = 0;
  int x_first = 0;
  int y_first = 0;
  for (int i = 0; i < draws; ++i) {
    const auto d = maximal_coupling_draw(rng, m1, m2);
    equal += d.x_next == d.y_next ? 1 : 0;
    x_first += d.x_next == 0 ? 1 : 0;
    y_first += d.y_next == 0 ? 1 : 0;
  }
  CHECK(std::abs(equal / double(draws) - 0.75) < 0.01);
  CHECK(std::abs(x_first / double(draws) - 0.5) < 0.01);
  CHECK(std::abs(y_first / double(draws) - 0.75) < 0.01);
}

TEST_CASE("Doeblin certificate on the two-state kernel")
{
  const auto kernel = two_state_kernel();
  const auto cert = doeblin_epsilon(kernel, 1);
  CHECK(std::abs(cert.epsilon - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(cert.gamma[0] - 0.75) < 1e-12);
  CHECK(std::abs(cert.gamma[1] - 0.25) < 1e-12);
  CHECK(cert.covers_whole_space(2));
  CHECK(cert.verify(kernel));
  CHECK(doeblin_bound(cert, 0) == 1.0);
  CHECK(std::abs(doeblin_bound(cert, 3) - std::pow(1.0 / 3.0, 3)) < 1e-12);
}

TEST_CASE("Doeblin epsilon is one for a perfect proposal")
{
  const std::vector<double> a{0.1, 0.2, 0.3, 0.4};
  const auto kernel = build_kernel(a, a);
  CHECK(std::abs(doeblin_epsilon(kernel, 1).epsilon - 1.0) < 1e-12);
}

TEST_CASE("no uniform minorisation")
{
  // A deterministic cycle has no common mass at N0 = 1.
  TransitionMatrix cycle{Matrix(3, 3), {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  cycle.entries(0, 1) = 1.0;
  cycle.entries(1, 2) = 1.0;
  cycle.entries(2, 0) = 1.0;
  CHECK_THROWS_WITH(doeblin_epsilon(cycle, 1), doctest::Contains("no uniform minorisation at this N0"));
  CHECK_THROWS_WITH(doeblin_epsilon(cycle, 3), doctest::Contains("N0 = 3"));
  CHECK_THROWS(minorisation_on_region(cycle, {}, 1));
}

TEST_CASE("Doeblin bound dominates exact TV on random kernels")
{
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
    const auto a = oracle::random_distribution(gen, n);
    const auto q = oracle::random_distribution(gen, n);
    const auto kernel = build_kernel(a, q);
    const auto ref = oracle::mh_kernel(a, q);
    for (std::size_t n0 : {1u, 2u}) {
      const auto cert = doeblin_epsilon(kernel, n0);
      CHECK(cert.verify(kernel));
      oracle::Vec p0(n, 0.0);
      p0[trial % n] = 1.0;
      double previous = 1.0;
      for (std::size_t k = 0; k <= 40; ++k) {
        const double tv = oracle::half_l1(p0, a);
        CHECK(tv <= doeblin_bound(cert, k) + 1e-12);
        CHECK(tv <= previous + 1e-12);
        previous = tv;
        p0 = oracle::step(p0, ref);
      }
    }
  }
}

TEST_CASE("coupled run on the two-state kernel")
{
  const auto kernel = two_state_kernel();
  const auto cert = doeblin_epsilon(kernel, 1);
  const std::vector<double> p0{0.0, 1.0};
  const auto report = coupled_run(kernel, cert, p0, 50, 10000, 5);
  // Geometric coupling time with success probability 2/3.
  CHECK(std::abs(report.mean_coupling_time - 1.5) < 0.05);
  CHECK(report.uncoalesced == 0);
  CHECK(report.coupling_times.size() == 10000);
  for (std::size_t k = 0; k <= 50; ++k) {
    CHECK(report.tv_curve[k] <= report.bound_curve[k] + 1e-12);
    CHECK(std::abs(report.tv_curve[k] - 0.75 * std::pow(1.0 / 3.0, static_cast<double>(k))) < 1e-12);
    CHECK(report.mismatch_curve[k] <= report.survival_curve[k] + 1e-15);
  }
  // The survival fraction tracks (1/3)^k.
  for (std::size_t k = 1; k <= 3; ++k) {
    const double expected = std::pow(1.0 / 3.0, static_cast<double>(k));
    const double se = std::sqrt(expected * (1.0 - expected) / 10000.0);
    CHECK(std::abs(report.survival_curve[k] - expected) < 4.0 * se);
  }
}

TEST_CASE("coupled run: parallel equals serial and errors")
{
  std::mt19937_64 gen(8);
  const auto a = oracle::random_distribution(gen, 5);
  const auto q = oracle::random_distribution(gen, 5);
  const auto kernel = build_kernel(a, q);
  const auto cert = doeblin_epsilon(kernel, 1);
  const std::vector<double> p0{1.0, 0.0, 0.0, 0.0, 0.0};
  const auto s = coupled_run(kernel, cert, p0, 30, 500, 3, Execution::serial);
  const auto p = coupled_run(kernel, cert, p0, 30, 500, 3, Execution::parallel);
  CHECK(s.coupling_times == p.coupling_times);
  CHECK(s.empirical_tv_curve == p.empirical_tv_curve);
  CHECK(s.mean_coupling_time == p.mean_coupling_time);

  const auto two_step = doeblin_epsilon(kernel, 2);
  CHECK_THROWS_WITH(coupled_run(kernel, two_step, p0, 10, 10, 1), doctest::Contains("N0 = 1"));
  auto forged = cert;
  forged.epsilon = 1.0;
  CHECK_THROWS_WITH(coupled_run(kernel, forged, p0, 10, 10, 1), doctest::Contains("does not hold"));
}

TEST_CASE("coupled pair on a minorisation region")
{
  std::mt19937_64 gen(12);
  const auto a = oracle::random_distribution(gen, 6);
  const auto q = oracle::random_distribution(gen, 6);
  const auto kernel = build_kernel(a, q);
  const auto cert = minorisation_on_region(kernel, {3, 1, 1}, 1);
  CHECK(cert.region == std::vector<std::size_t>{1, 3});
  CHECK_FALSE(cert.covers_whole_space(6));
  CHECK(cert.verify(kernel));
  const auto whole = doeblin_epsilon(kernel, 1);
  CHECK(cert.epsilon >= whole.epsilon - 1e-15);

  RngStream rng(4);
  const std::vector<double> p0{0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  const auto path = simulate_coupled_pair(rng, kernel, cert, p0, 40);
  CHECK(path.x_path.size() == 41);
  CHECK(path.z_counts.size() == 41);
  CHECK(path.x_path[0] == 5);
  for (std::size_t k = 1; k < path.z_counts.size(); ++k) CHECK(path.z_counts[k] >= path.z_counts[k - 1]);
  if (path.coalesced) {
    for (std::size_t k = path.coupling_time; k <= 40; ++k) CHECK(path.x_path[k] == path.y_path[k]);
  }

  const auto report = coupled_run(kernel, cert, p0, 40, 2000, 9);
  for (std::size_t k = 0; k <= 40; ++k) {
    CHECK(report.bound_curve[k] >= 0.0);
    // The region bound dominates the exact TV up to Monte Carlo noise in Prob(z_k < j).
    CHECK(report.tv_curve[k] <= report.bound_curve[k] + 0.05);
  }
}
