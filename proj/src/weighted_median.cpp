#include "ladreg/weighted_median.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ladreg/errors.hpp"

namespace ladreg {

double weighted_median_inplace(std::vector<std::pair<double, double>>& buf) {
    // Zero weights cannot move the minimizer; drop them up front.
    std::erase_if(buf, [](const auto& p) { return p.second <= 0.0; });
    if (buf.empty()) throw NoMassError("weighted_median: total weight is zero");

    std::sort(buf.begin(), buf.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Total and cumulative sums use the same (sorted) order so the
    // half-weight comparison is reproducible.
    double total = 0.0;
    for (const auto& p : buf) total += p.second;

    const double half = 0.5 * total;
    double cum = 0.0;
    for (const auto& p : buf) {
        cum += p.second;
        if (cum >= half) return p.first;
    }
    return buf.back().first;  // unreachable barring rounding in the last step
}

double weighted_median(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size())
        throw std::invalid_argument("weighted_median: length mismatch");
    std::vector<std::pair<double, double>> buf;
    buf.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) buf.emplace_back(values[i], weights[i]);
    return weighted_median_inplace(buf);
}

double weighted_median(const WeightedSample& sample) {
    return weighted_median(std::span<const double>(sample.values),
                           std::span<const double>(sample.weights));
}

double lad_objective(const WeightedSample& sample, double theta) {
    double obj = 0.0;
    for (std::size_t i = 0; i < sample.values.size(); ++i)
        obj += sample.weights[i] * std::abs(sample.values[i] - theta);
    return obj;
}

}  // namespace ladreg
