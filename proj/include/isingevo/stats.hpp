#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace isingevo {

double mean(std::span<const double> xs);
/// Population variance (divides by n).
double variance(std::span<const double> xs);
double median(std::span<const double> xs);
/// Linear interpolation between order statistics (q in [0, 1]).
double quantile(std::span<const double> xs, double q);

struct FitnessSummary {
  double best = 0.0;
  double mean = 0.0;
  double median = 0.0;
};
FitnessSummary summarize(std::span<const double> fitness);

/// Indices sorted by descending value; equal values keep index order.
std::vector<std::size_t> descending_order(std::span<const double> values);

}  // namespace isingevo
