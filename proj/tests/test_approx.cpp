#include <doctest.h>

#include <random>
#include <sstream>

#include "mtmc/approx.hpp"
#include "mtmc/samplers.hpp"
#include "oracles.hpp"

using namespace mtmc;

namespace {

ApproximationState two_points()
{
  ApproximationState s(1);
  s.insert(Point{0.0}, 0.8);
  s.insert(Point{1.0}, 0.2);
  return s;
}

} // namespace

TEST_CASE("nearest-neighbour evaluation")
{
  const auto s = two_points();
  CHECK(s.evaluate(Point{0.4}) == 0.8);
  CHECK(s.evaluate(Point{0.5}) == 0.8);
  CHECK(s.evaluate(Point{0.9}) == 0.2);
  CHECK(s.evaluate(Point{-3.0}) == 0.8);

  const ApproximationState empty(1, 1.0);
  CHECK(empty.evaluate(Point{123.0}) == 1.0);
  CHECK_FALSE(empty.nearest(std::vector<double>{0.0}).has_value());
}

TEST_CASE("update appends and advances the generation")
{
  const ApproximationState empty(1);
  const auto one = update(empty, Point{2.0}, 0.6);
  CHECK(empty.size() == 0);
  CHECK(one.generation() == 1);
  CHECK(one.evaluate(Point{-50.0}) == 0.6);
  CHECK(one.evaluate(Point{50.0}) == 0.6);

  ApproximationState s(1);
  s.insert(Point{0.0}, 0.8);
  const auto s2 = update(s, Point{1.0}, 0.2);
  CHECK(s2.evaluate(Point{0.9}) == 0.2);
  CHECK(s2.generation() == s.generation() + 1);
}

TEST_CASE("re-evaluation consistency")
{
  auto s = two_points();
  CHECK_THROWS_WITH(s.insert(Point{1.0}, 0.3), doctest::Contains("inconsistent re-evaluation"));
  const std::size_t before = s.size();
  s.insert(Point{1.0}, 0.2);
  CHECK(s.size() == before);
  CHECK(s.generation() == 3);
}

TEST_CASE("interpolation identity over random archives in the unit square")
{
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ApproximationState s(2);
  for (int i = 0; i < 100; ++i) {
    const Point x{u(gen), u(gen)};
    const double v = u(gen);
    s = update(s, x, v);
    CHECK(s.evaluate(x) == v);
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto r = s.record(k);
    CHECK(s.evaluate(r.point) == r.value);
    CHECK(r.index == k);
  }
}

TEST_CASE("k-d tree agrees with a brute-force scan")
{
  std::mt19937_64 gen(19);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t dim : {1u, 2u, 3u}) {
    ApproximationState s(dim);
    std::vector<oracle::Vec> pts;
    for (int i = 0; i < 400; ++i) {
      oracle::Vec c(dim);
      // Coarse lattice coordinates produce many exact distance ties.
      for (auto& x : c) x = std::round(u(gen) * 4.0) / 4.0;
      if (std::find(pts.begin(), pts.end(), c) != pts.end()) continue;
      pts.push_back(c);
      s.insert(Point(c), static_cast<double>(i + 1));
    }
    for (int q = 0; q < 2000; ++q) {
      oracle::Vec c(dim);
      for (auto& x : c) x = q % 2 == 0 ? std::round(u(gen) * 8.0) / 8.0 : u(gen);
      const auto expected = oracle::nearest(pts, c);
      CHECK(*s.nearest(c) == expected);
      CHECK(*s.nearest_brute_force(c) == expected);
      CHECK(*s.nearest_brute_force(c, Execution::parallel) == expected);
    }
  }
}

TEST_CASE("refinement only changes the new cell")
{
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ApproximationState s(2);
  for (int i = 0; i < 30; ++i) s.insert(Point{u(gen), u(gen)}, u(gen));
  const Point added{0.5, 0.5};
  const auto next = update(s, added, 9.0);
  for (int q = 0; q < 2000; ++q) {
    const Point x{u(gen), u(gen)};
    if (next.evaluate(x) != s.evaluate(x)) CHECK(*next.nearest(x.coords()) == next.size() - 1);
  }
}

TEST_CASE("snapshots replay earlier generations")
{
  ApproximationState s(1);
  for (int i = 0; i < 10; ++i) s.insert(Point{static_cast<double>(i)}, static_cast<double>(i + 1));
  const auto early = s.snapshot(3);
  CHECK(early.size() == 3);
  CHECK(early.generation() == 3);
  CHECK(early.evaluate(Point{8.0}) == 3.0);
  CHECK(s.snapshot(0).empty());
  CHECK_THROWS(s.snapshot(11));
}

TEST_CASE("sup_error")
{
  const auto target = targets::gaussian_shape({0.0}, {1.0});
  const auto grid = tensor_grid(Box{{-3.0}, {3.0}}, 101);

  ApproximationState full(1);
  for (const auto& x : grid) full.insert(x, target(x));
  CHECK(sup_error(full, target, grid) == 0.0);

  const TargetDensity flat(1, [](std::span<const double>) { return 2.5; });
  CHECK(sup_error(ApproximationState(1, 1.0), flat, grid) == 0.0);

  const TargetDensity zero(1, [](std::span<const double>) { return 0.0; });
  CHECK_THROWS(sup_error(ApproximationState(1, 1.0), zero, grid));
}

TEST_CASE("sup_error shrinks as the MTMC archive grows")
{
  const auto target = targets::gaussian_shape({0.0}, {1.0});
  const auto grid = tensor_grid(Box{{-4.0}, {4.0}}, 101);
  const auto proposal = Proposal::gaussian_random_walk(1, 2.0);
  int monotone = 0;
  const int seeds = 40;
  for (int seed = 0; seed < seeds; ++seed) {
    ChainConfig config;
    config.length = 2000;
    config.initial = Point{0.0};
    config.seed = static_cast<std::uint64_t>(seed);
    const auto run = run_chain(config, target, proposal);
    const auto& archive = *run.approximation;
    REQUIRE(archive.size() >= 80);
    const double e5 = sup_error(archive.snapshot(5), target, grid);
    const double e20 = sup_error(archive.snapshot(20), target, grid);
    const double e80 = sup_error(archive.snapshot(80), target, grid);
    monotone += (e20 <= e5 && e80 <= e20) ? 1 : 0;
  }
  CHECK(monotone >= 38);
}

TEST_CASE("successive differences vanish for duplicate inserts")
{
  const auto grid = tensor_grid(Box{{0.0}, {1.0}}, 11);
  auto s = two_points();
  auto t = s;
  t.insert(Point{1.0}, 0.2);
  CHECK(successive_difference(s, t, grid) == 0.0);
  t.insert(Point{0.5}, 5.0);
  CHECK(successive_difference(s, t, grid) > 0.0);
}

TEST_CASE("archive CSV round trip")
{
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ApproximationState s(2, 0.5);
  for (int i = 0; i < 50; ++i) s.insert(Point{u(gen), u(gen)}, std::abs(u(gen)));
  std::ostringstream os;
  os << "# scenario: test\n";
  write_archive_csv(os, s);
  std::istringstream is(os.str());
  const auto back = read_archive_csv(is, 0.5);
  REQUIRE(back.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(back.record(k).point == s.record(k).point);
    CHECK(back.record(k).value == s.record(k).value);
  }
  std::istringstream broken("index,coord_0,value\n0,abc,1\n");
  CHECK_THROWS(read_archive_csv(broken));
}

TEST_CASE("evaluate_on_grid parallel equals serial")
{
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  ApproximationState s(2);
  for (int i = 0; i < 300; ++i) s.insert(Point{u(gen), u(gen)}, std::abs(u(gen)));
  const auto grid = tensor_grid(Box{{-2.0, -2.0}, {2.0, 2.0}}, 41);
  CHECK(evaluate_on_grid(s, grid, Execution::serial) == evaluate_on_grid(s, grid, Execution::parallel));
}
