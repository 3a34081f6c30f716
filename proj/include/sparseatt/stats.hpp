#pragma once

#include <vector>

namespace sparseatt {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Requires >= 2 points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log(y) against log(x); inputs must be positive.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);

}  // namespace sparseatt
