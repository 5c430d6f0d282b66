#pragma once

#include <span>
#include <utility>
#include <vector>

namespace ladreg {

// Targets and nonnegative kernel weights of one local L1 location problem.
struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;
};

// Exact minimizer of sum_i w_i |v_i - theta|: the smallest value whose
// cumulative weight reaches half the total.  When the cumulative weight hits
// exactly half, the whole interval up to the next value minimizes and the
// left endpoint is returned, matching the quantile convention
// Q(Z) = inf{z : P(Z <= z) >= 1/2}.  Throws NoMassError if no weight > 0.
double weighted_median(const WeightedSample& sample);
double weighted_median(std::span<const double> values, std::span<const double> weights);

// In-place variant for hot loops; sorts and consumes the buffer of
// (value, weight) pairs.  Zero-weight entries may be present.
double weighted_median_inplace(std::vector<std::pair<double, double>>& buf);

// sum_i w_i |v_i - theta|; explicit objective used by oracle tests.
double lad_objective(const WeightedSample& sample, double theta);

}  // namespace ladreg
