#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mtmc/diagnostics.hpp"
#include "mtmc/samplers.hpp"
#include "oracles.hpp"

using namespace mtmc;

TEST_CASE("tv_discrete worked values and errors")
{
  CHECK(tv_discrete(std::vector<double>{0.5, 0.5}, std::vector<double>{0.75, 0.25}).value == 0.25);
  CHECK(tv_discrete(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}).value == 1.0);
  CHECK(tv_discrete(std::vector<double>{0.2, 0.8}, std::vector<double>{0.2, 0.8}).value == 0.0);
  CHECK(tv_discrete(std::vector<double>{0.2, 0.8}, std::vector<double>{0.2, 0.8}).scheme == TvScheme::exact_discrete);
  CHECK_THROWS_WITH(tv_discrete(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0}), doctest::Contains("dimension mismatch"));
  CHECK_THROWS(tv_discrete(std::vector<double>{0.5, 0.6}, std::vector<double>{0.5, 0.5}));
  CHECK(to_string(TvScheme::exact_discrete) == "exact-discrete");
  CHECK(to_string(TvScheme::histogram_binned) == "histogram-binned");
}

TEST_CASE("tv_discrete is a metric and matches the subset supremum")
{
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 11);
    const auto p = oracle::random_distribution(gen, n, 0.0);
    const auto q = oracle::random_distribution(gen, n, 0.0);
    const auto r = oracle::random_distribution(gen, n, 0.0);
    const double pq = tv_discrete(p, q).value;
    CHECK(pq >= 0.0);
    CHECK(pq <= 1.0);
    CHECK(pq == tv_discrete(q, p).value);
    CHECK(tv_discrete(p, p).value == 0.0);
    CHECK(pq <= tv_discrete(p, r).value + tv_discrete(r, q).value + 1e-15);
    CHECK(std::abs(pq - oracle::tv_by_subsets(p, q)) < 1e-14);
  }
}

TEST_CASE("histogram TV of exact draws is small")
{
  const auto target = targets::gaussian_shape({0.0}, {1.0});
  RngStream rng(21);
  std::vector<Point> draws;
  for (int i = 0; i < 100000; ++i) draws.push_back(Point{rng.normal()});
  const Binning bins{Box{{-4.0}, {4.0}}, {20}};
  const auto est = tv_histogram(draws, target, bins);
  CHECK(est.value < 0.01);
  CHECK(est.scheme == TvScheme::histogram_binned);
  CHECK(est.bins == 21);
  CHECK(est.samples == 100000);

  const std::vector<Point> single(1000, Point{3.9});
  CHECK(tv_histogram(single, target, bins).value > 0.99);

  const Binning empty{Box{{-4.0}, {4.0}}, {}};
  CHECK_THROWS_WITH(tv_histogram(draws, target, empty), doctest::Contains("empty bins spec"));
}

TEST_CASE("binning cells")
{
  const Binning bins{Box{{0.0, 0.0}, {1.0, 2.0}}, {2, 4}};
  CHECK(bins.cell_count() == 8);
  CHECK(bins.cell_of(std::vector<double>{0.1, 0.1}) == 0);
  CHECK(bins.cell_of(std::vector<double>{0.9, 1.9}) == 7);
  CHECK(bins.cell_of(std::vector<double>{1.5, 1.0}) == 8);
}

TEST_CASE("histogram TV on labels")
{
  const auto target = targets::discrete_table({0.75, 0.25});
  std::vector<Point> samples;
  for (int i = 0; i < 3; ++i) samples.push_back(Point{1.0});
  samples.push_back(Point{2.0});
  CHECK(tv_histogram_discrete(samples, target, 2).value == 0.0);
  samples.push_back(Point{2.0});
  CHECK(std::abs(tv_histogram_discrete(samples, target, 2).value - 0.15) < 1e-15);
}

TEST_CASE("Gauss-Legendre accuracy")
{
  for (std::size_t order : {1u, 2u, 5u, 8u, 16u}) {
    const auto rule = gauss_legendre(order);
    // Exact for polynomials of degree 2 order - 1.
    for (std::size_t deg = 0; deg < 2 * order; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < order; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(deg));
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / static_cast<double>(deg + 1);
      CHECK(std::abs(s - exact) < 1e-13);
    }
  }
  const auto rule = gauss_legendre(16);
  double s = 0.0;
  for (std::size_t i = 0; i < 16; ++i) s += rule.weights[i] * std::exp(rule.nodes[i]);
  CHECK(std::abs(s - oracle::simpson([](double x) { return std::exp(x); }, -1.0, 1.0)) < 1e-12);
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("generation gaps: frozen and exact archives")
{
  const auto target = targets::gaussian_shape({0.0}, {1.0});
  const auto grid = tensor_grid(Box{{-3.0}, {3.0}}, 31);

  ApproximationState exact(1);
  for (const auto& x : grid) exact.insert(x, target(x));
  auto same = exact;
  same.insert(grid[3], target(grid[3]));
  const std::vector<ApproximationState> frozen{exact, same};
  const auto gaps = generation_gaps(frozen, target, grid);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].m == exact.generation());
  CHECK(gaps[0].delta_m < 1e-15);
  CHECK(gaps[0].D_m == 0.0);

  ApproximationState coarse(1);
  coarse.insert(Point{0.0}, 1.0);
  auto finer = update(coarse, Point{2.0}, target(Point{2.0}));
  const std::vector<ApproximationState> moving{coarse, finer};
  const auto g = generation_gaps(moving, target, grid);
  const auto p = target_on_grid(target, grid);
  CHECK(std::abs(g[0].delta_m - oracle::half_l1(normalized(evaluate_on_grid(coarse, grid)), normalized(p))) < 1e-15);
  CHECK(g[0].delta_m == approximation_gap(coarse, p, grid));
  CHECK(g[0].D_m > 0.0);
  CHECK(g[0].D_m <= 1.0);
  CHECK_THROWS(generation_gaps(std::vector<ApproximationState>{coarse}, target, grid));
}

TEST_CASE("delta shrinks on an MTMC archive")
{
  const auto target = targets::mixture_of_bumps({{-1.5}, {1.5}}, {0.6, 0.6}, {1.0, 1.0});
  const auto grid = tensor_grid(Box{{-5.0}, {5.0}}, 201);
  const auto proposal = Proposal::gaussian_random_walk(1, 2.0);
  ChainConfig config;
  config.length = 10000;
  config.initial = Point{0.0};
  config.seed = 1;
  const auto run = run_chain(config, target, proposal);
  const auto p = target_on_grid(target, grid);
  const auto& archive = *run.approximation;
  const double d5 = approximation_gap(archive.snapshot(5), p, grid);
  const double d80 = approximation_gap(archive.snapshot(80), p, grid);
  CHECK(d80 < d5);
}

TEST_CASE("ergodic averages and batch means")
{
  const std::vector<Point> trace(100, Point{2.0});
  const auto means = ergodic_average(trace, [](const Point& x) { return x[0]; }, 5.0);
  CHECK(means.size() == 100);
  for (double m : means) CHECK(m == 2.0);
  CHECK_THROWS_WITH(ergodic_average(trace, [](const Point& x) { return x[0]; }, 1.0),
                    doctest::Contains("observable exceeds its declared bound at step 0"));

  const std::vector<Point> walk{Point{1.0}, Point{3.0}, Point{2.0}};
  const auto running = ergodic_average(walk, [](const Point& x) { return x[0]; }, 10.0);
  CHECK(running == std::vector<double>{1.0, 2.0, 2.0});

  // Batch means of i.i.d. normals estimate sigma / sqrt(n).
  RngStream rng(6);
  std::vector<double> values;
  for (int i = 0; i < 40000; ++i) values.push_back(rng.normal());
  const double se = batch_means_se(values, 40);
  CHECK(std::abs(se / (1.0 / 200.0) - 1.0) < 0.35);
  CHECK(batch_means_se(std::vector<double>(100, 3.0)) == 0.0);
  CHECK_THROWS(batch_means_se(values, 1));
  CHECK_THROWS(batch_means_se(std::vector<double>{1.0}, 20));
}

TEST_CASE("detailed balance")
{
  std::mt19937_64 gen(71);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 8);
    const auto a = oracle::random_distribution(gen, n);
    const auto q = oracle::random_distribution(gen, n);
    const auto kernel = build_kernel(a, q);
    CHECK(detailed_balance_check(kernel.entries, a) < 1e-12);
  }
  const std::vector<double> a{0.75, 0.25};
  auto perturbed = build_kernel(a, std::vector<double>{0.5, 0.5}).entries;
  perturbed(0, 1) += 0.01;
  perturbed(0, 0) -= 0.01;
  CHECK(detailed_balance_check(perturbed, a) > 1e-3);
}

TEST_CASE("frozen grid kernels of a live run are reversible")
{
  const auto target = targets::gaussian_shape({0.0}, {1.0});
  const auto grid = tensor_grid(Box{{-3.0}, {3.0}}, 41);
  const auto proposal = Proposal::gaussian_random_walk(1, 2.0);
  ChainConfig config;
  config.length = 500;
  config.initial = Point{0.0};
  config.seed = 4;
  const auto run = run_chain(config, target, proposal);
  for (std::size_t m : {1u, 5u, 20u}) {
    const auto a = normalized(evaluate_on_grid(run.approximation->snapshot(m), grid));
    const auto kernel = frozen_grid_kernel(a);
    CHECK(kernel.row_sum_error() < 1e-12);
    CHECK(detailed_balance_check(kernel.entries, a) < 1e-12);
  }
  CHECK_THROWS(frozen_grid_kernel(std::vector<double>{1.0, 0.0}));
}

TEST_CASE("diagnostics CSV writes NaN as an empty field")
{
  const std::vector<DiagnosticsRow> rows{{10, 0.5, std::nan(""), 0.25, 1.0}};
  std::ostringstream os;
  write_diagnostics_csv(os, rows);
  CHECK(os.str().find("10,0.5,,0.25,1") != std::string::npos);
}
