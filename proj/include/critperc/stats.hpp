#pragma once

#include <span>
#include <vector>

namespace critperc {

struct MeanEstimate {
  long count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double half_width = 0.0;  // two-sided 95% normal interval
  double lower = 0.0;
  double upper = 0.0;
};

// Normal-approximation interval; count < 2 gives a zero-width interval.
MeanEstimate mean_estimate(std::span<const double> values);

struct Proportion {
  long successes = 0;
  long trials = 0;
  double fraction = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 1.0;
};

Proportion wilson_interval(long successes, long trials, double z = 1.96);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Upper tail P[chi2_dof >= statistic].
double chi_square_p_value(double statistic, int dof);
// Goodness of fit against equal expected counts.
ChiSquare chi_square_uniform(std::span<const long> counts);

// Linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace critperc
