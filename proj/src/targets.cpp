#include "mtmc/core.hpp"

#include <algorithm>
#include <cmath>

namespace mtmc::targets {

TargetDensity gaussian_shape(std::vector<double> mean, std::vector<double> sd, double cost)
{
  if (mean.empty() || mean.size() != sd.size()) throw Error("gaussian target: mean/sd size mismatch");
  for (double s : sd) {
    if (!(s > 0.0)) throw Error("gaussian target: sd must be positive");
  }
  const std::size_t d = mean.size();
  return TargetDensity(
      d,
      [mean = std::move(mean), sd = std::move(sd)](std::span<const double> x) {
        double q = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double z = (x[i] - mean[i]) / sd[i];
          q += z * z;
        }
        return std::exp(-0.5 * q);
      },
      cost);
}

TargetDensity mixture_of_bumps(std::vector<std::vector<double>> centers, std::vector<double> widths,
                               std::vector<double> weights, double cost)
{
  if (centers.empty()) throw Error("mixture target: no components");
  if (centers.size() != widths.size() || centers.size() != weights.size()) {
    throw Error("mixture target: centers/widths/weights size mismatch");
  }
  const std::size_t d = centers.front().size();
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (centers[k].size() != d || d == 0) throw Error("mixture target: inconsistent center dimension");
    if (!(widths[k] > 0.0)) throw Error("mixture target: widths must be positive");
    if (!(weights[k] > 0.0)) throw Error("mixture target: weights must be positive");
  }
  return TargetDensity(
      d,
      [centers = std::move(centers), widths = std::move(widths),
       weights = std::move(weights)](std::span<const double> x) {
        double total = 0.0;
        for (std::size_t k = 0; k < centers.size(); ++k) {
          const double d2 = squared_distance(x, centers[k]) / (widths[k] * widths[k]);
          total += weights[k] * std::exp(-0.5 * d2);
        }
        return total;
      },
      cost);
}

TargetDensity discrete_table(std::vector<double> masses, double cost)
{
  if (masses.size() < 2) throw Error("discrete target: need at least 2 states");
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw Error("discrete target: masses must be nonnegative");
  }
  return TargetDensity(
      1,
      [masses = std::move(masses)](std::span<const double> x) {
        const double label = x[0];
        if (label != std::floor(label) || label < 1.0 || label > static_cast<double>(masses.size())) {
          return 0.0;
        }
        return masses[static_cast<std::size_t>(label) - 1];
      },
      cost);
}

TargetDensity grid_table(double lower, double upper, std::vector<double> values, double cost)
{
  if (values.size() < 2) throw Error("grid target: need at least 2 values");
  if (!(upper > lower)) throw Error("grid target: upper must exceed lower");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("grid target: values must be nonnegative");
  }
  return TargetDensity(
      1,
      [lower, upper, values = std::move(values)](std::span<const double> x) {
        const double step = (upper - lower) / static_cast<double>(values.size() - 1);
        const double t = std::round((x[0] - lower) / step);
        const double clamped = std::clamp(t, 0.0, static_cast<double>(values.size() - 1));
        return values[static_cast<std::size_t>(clamped)];
      },
      cost);
}

} // namespace mtmc::targets
