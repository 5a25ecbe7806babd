#include <doctest.h>

#include <omp.h>
#include <random>

#include "mtmc/kernels.hpp"
#include "oracles.hpp"

using namespace mtmc;

namespace {

Matrix random_matrix(std::mt19937_64& gen, std::size_t n)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = u(gen);
  }
  return m;
}

struct ThreadCount {
  explicit ThreadCount(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~ThreadCount() { omp_set_num_threads(saved); }
  int saved;
};

} // namespace

TEST_CASE("nearest_scan: parallel equals serial, ties to the smallest index")
{
  const ThreadCount threads(4);
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> lattice(-3, 3);
  for (std::size_t dim : {1u, 2u, 3u}) {
    std::vector<double> flat;
    std::vector<oracle::Vec> pts;
    for (int i = 0; i < 5000; ++i) {
      oracle::Vec c(dim);
      for (auto& x : c) x = lattice(gen);
      pts.push_back(c);
      flat.insert(flat.end(), c.begin(), c.end());
    }
    for (int q = 0; q < 200; ++q) {
      std::vector<double> query(dim);
      for (auto& x : query) x = lattice(gen) * 0.5;
      const auto s = kernels::nearest_scan(flat, dim, query, Execution::serial);
      const auto p = kernels::nearest_scan(flat, dim, query, Execution::parallel);
      CHECK(s.index == p.index);
      CHECK(s.distance2 == p.distance2);
      CHECK(s.index == oracle::nearest(pts, query));
    }
  }
}

TEST_CASE("vec_mat and mat_mul: parallel equals serial bitwise")
{
  const ThreadCount threads(4);
  std::mt19937_64 gen(2);
  for (std::size_t n : {1u, 7u, 64u, 129u}) {
    const auto a = random_matrix(gen, n);
    const auto b = random_matrix(gen, n);
    CHECK(kernels::mat_mul(a, b, Execution::serial) == kernels::mat_mul(a, b, Execution::parallel));
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a(0, i);
    std::vector<double> s(n);
    std::vector<double> p(n);
    kernels::vec_mat(x, b, s, Execution::serial);
    kernels::vec_mat(x, b, p, Execution::parallel);
    CHECK(s == p);
  }
}

TEST_CASE("mat_pow agrees with repeated products")
{
  const ThreadCount threads(4);
  std::mt19937_64 gen(3);
  for (std::size_t n : {2u, 5u, 9u}) {
    oracle::Mat ref(n);
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      ref[i] = oracle::random_distribution(gen, n);
      for (std::size_t j = 0; j < n; ++j) m(i, j) = ref[i][j];
    }
    CHECK(kernels::mat_pow(m, 0, Execution::serial) == Matrix::identity(n));
    for (std::size_t k : {1u, 2u, 7u, 30u}) {
      const auto s = kernels::mat_pow(m, k, Execution::serial);
      CHECK(s == kernels::mat_pow(m, k, Execution::parallel));
      const auto r = oracle::power(ref, k);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(s(i, j) - r[i][j]) < 1e-13);
      }
    }
  }
}
