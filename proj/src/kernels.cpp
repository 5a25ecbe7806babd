#include "mtmc/kernels.hpp"

#include <algorithm>
#include <limits>

#include <omp.h>

#include "mtmc/core.hpp"

namespace mtmc::kernels {

namespace {

bool better(double d2, std::size_t idx, const NearestHit& best)
{
  return d2 < best.distance2 || (d2 == best.distance2 && idx < best.index);
}

NearestHit scan_range(std::span<const double> points, std::size_t dim, std::span<const double> query,
                      std::size_t begin, std::size_t end)
{
  NearestHit best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
  for (std::size_t i = begin; i < end; ++i) {
    const double d2 = squared_distance(points.subspan(i * dim, dim), query);
    if (better(d2, i, best)) best = {i, d2};
  }
  return best;
}

void mat_row(const Matrix& a, const Matrix& b, std::size_t i, Matrix& out)
{
  auto dst = out.row(i);
  for (std::size_t j = 0; j < b.cols(); ++j) dst[j] = 0.0;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double aik = a(i, k);
    const auto src = b.row(k);
    for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
  }
}

} // namespace

NearestHit nearest_scan(std::span<const double> points, std::size_t dim, std::span<const double> query,
                        Execution exec)
{
  const std::size_t count = dim == 0 ? 0 : points.size() / dim;
  if (count == 0) throw Error("nearest-neighbour scan over an empty point set");
  if (exec == Execution::serial) return scan_range(points, dim, query, 0, count);

  NearestHit best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
#pragma omp parallel
  {
    const auto threads = static_cast<std::size_t>(omp_get_num_threads());
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t chunk = (count + threads - 1) / threads;
    const std::size_t begin = std::min(count, tid * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    const NearestHit local = scan_range(points, dim, query, begin, end);
#pragma omp critical(mtmc_nearest_scan)
    {
      if (local.index != std::numeric_limits<std::size_t>::max() && better(local.distance2, local.index, best)) {
        best = local;
      }
    }
  }
  return best;
}

void vec_mat(std::span<const double> x, const Matrix& m, std::span<double> out, Execution exec)
{
  if (x.size() != m.rows() || out.size() != m.cols()) throw Error("vec_mat: dimension mismatch");
  const auto cols = static_cast<std::ptrdiff_t>(m.cols());
  const auto rows = m.rows();
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows; ++i) acc += x[i] * m(i, static_cast<std::size_t>(j));
    out[static_cast<std::size_t>(j)] = acc;
  }
}

Matrix mat_mul(const Matrix& a, const Matrix& b, Execution exec)
{
  if (a.cols() != b.rows()) throw Error("mat_mul: dimension mismatch");
  Matrix out(a.rows(), b.cols());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (std::ptrdiff_t i = 0; i < rows; ++i) mat_row(a, b, static_cast<std::size_t>(i), out);
  return out;
}

Matrix mat_pow(const Matrix& m, std::size_t power, Execution exec)
{
  if (m.rows() != m.cols()) throw Error("mat_pow: matrix is not square");
  Matrix result = Matrix::identity(m.rows());
  Matrix base = m;
  bool first = true;
  while (power > 0) {
    if (power & 1u) {
      result = first ? base : mat_mul(result, base, exec);
      first = false;
    }
    power >>= 1u;
    if (power > 0) base = mat_mul(base, base, exec);
  }
  return result;
}

} // namespace mtmc::kernels
