#include "critperc/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "critperc/error.hpp"

namespace critperc {

MeanEstimate mean_estimate(std::span<const double> values) {
  MeanEstimate out;
  out.count = static_cast<long>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.count;
  if (out.count >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (out.count - 1));
    out.half_width = 1.96 * out.stddev / std::sqrt(static_cast<double>(out.count));
  }
  out.lower = out.mean - out.half_width;
  out.upper = out.mean + out.half_width;
  return out;
}

Proportion wilson_interval(long successes, long trials, double z) {
  if (trials < 0 || successes < 0 || successes > trials) {
    throw PreconditionError("invalid success / trial counts");
  }
  Proportion out;
  out.successes = successes;
  out.trials = trials;
  if (trials == 0) return out;
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  out.fraction = p;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  out.wilson_low = std::max(0.0, centre - half);
  out.wilson_high = std::min(1.0, centre + half);
  return out;
}

double chi_square_p_value(double statistic, int dof) {
  if (dof < 1) throw PreconditionError("chi-square needs at least one degree of freedom");
  if (statistic <= 0.0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

ChiSquare chi_square_uniform(std::span<const long> counts) {
  if (counts.size() < 2) throw PreconditionError("chi-square needs at least two cells");
  double total = 0.0;
  for (long c : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw PreconditionError("chi-square needs observations");
  const double expected = total / counts.size();
  ChiSquare out;
  for (long c : counts) out.statistic += (c - expected) * (c - expected) / expected;
  out.dof = static_cast<int>(counts.size()) - 1;
  out.p_value = chi_square_p_value(out.statistic, out.dof);
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw PreconditionError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw PreconditionError("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * (values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("slope needs two or more points");
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw PreconditionError("log-log slope needs positive values");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw PreconditionError("slope undefined for identical x values");
  return (k * sxy - sx * sy) / denom;
}

}  // namespace critperc
