#include "ladreg/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ladreg/errors.hpp"
#include "ladreg/estimate.hpp"
#include "ladreg/parallel.hpp"
#include "ladreg/weighted_median.hpp"

namespace ladreg {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Local median over the pooled view with one subject masked out.
double masked_median(const PooledView& view, int skip_subject, double x, double bandwidth,
                     const KernelSpec& kernel, std::vector<std::pair<double, double>>& buf) {
    buf.clear();
    const auto [first, last] = view.window(x - bandwidth, x + bandwidth);
    for (std::size_t i = first; i < last; ++i) {
        if (view.subject[i] == skip_subject) continue;
        const double w = eval_kernel(kernel, (view.x[i] - x) / bandwidth);
        if (w > 0.0) buf.emplace_back(view.y[i], w);
    }
    if (buf.empty()) throw NoMassError("held-out point without kernel mass");
    return weighted_median_inplace(buf);
}

double masked_jackknife(const PooledView& view, int skip_subject, double x, double bandwidth,
                        const KernelSpec& kernel, std::vector<std::pair<double, double>>& buf) {
    const double fit_b = masked_median(view, skip_subject, x, bandwidth, kernel, buf);
    const double fit_sb = masked_median(view, skip_subject, x, kSqrt2 * bandwidth, kernel, buf);
    return 2.0 * fit_b - fit_sb;
}

std::vector<std::size_t> evaluated_subjects(std::size_t n, int cap) {
    std::vector<std::size_t> idx;
    if (cap <= 0 || static_cast<std::size_t>(cap) >= n) {
        idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        return idx;
    }
    // Evenly spaced subset, deterministic in the subject order.
    idx.reserve(static_cast<std::size_t>(cap));
    for (int k = 0; k < cap; ++k)
        idx.push_back(static_cast<std::size_t>(
            (static_cast<double>(k) + 0.5) * static_cast<double>(n) / cap));
    return idx;
}

}  // namespace

CvScore cv_score(const Dataset& data, double bandwidth, CvCriterion criterion,
                 const KernelSpec& kernel, int max_subjects_evaluated, int threads,
                 bool approximate, int approx_grid_size) {
    if (data.subjects.size() < 2) throw CvError("cross-validation needs at least 2 subjects");
    if (!(bandwidth > 0.0)) throw CvError("bandwidth must be positive");

    const PooledView view = PooledView::build(data);
    const auto subjects = evaluated_subjects(data.subjects.size(), max_subjects_evaluated);

    std::vector<double> losses(subjects.size(), 0.0);
    std::vector<std::size_t> scored(subjects.size(), 0), skipped(subjects.size(), 0);

    parallel_for(subjects.size(), threads, [&](std::size_t slot) {
        const std::size_t i = subjects[slot];
        const Subject& held_out = data.subjects[i];
        std::vector<std::pair<double, double>> buf;

        CurveEstimate approx_curve;
        if (approximate) {
            // One grid fit per (subject, bandwidth); predictions interpolate.
            approx_curve.grid = make_grid(data.a, data.b, approx_grid_size);
            approx_curve.values.assign(approx_curve.grid.size(),
                                       std::numeric_limits<double>::quiet_NaN());
            for (std::size_t g = 0; g < approx_curve.grid.size(); ++g) {
                try {
                    approx_curve.values[g] =
                        masked_jackknife(view, static_cast<int>(i), approx_curve.grid[g],
                                         bandwidth, kernel, buf);
                } catch (const NoMassError&) {
                }
            }
        }

        for (std::size_t j = 0; j < held_out.x.size(); ++j) {
            double pred;
            try {
                pred = approximate
                           ? approx_curve.interpolate(held_out.x[j])
                           : masked_jackknife(view, static_cast<int>(i), held_out.x[j],
                                              bandwidth, kernel, buf);
            } catch (const NoMassError&) {
                ++skipped[slot];
                continue;
            } catch (const ExtrapolationError&) {
                ++skipped[slot];
                continue;
            }
            const double r = held_out.y[j] - pred;
            losses[slot] += (criterion == CvCriterion::LAD) ? std::abs(r) : r * r;
            ++scored[slot];
        }
    });

    CvScore result;
    result.bandwidth = bandwidth;
    for (std::size_t k = 0; k < subjects.size(); ++k) {
        result.score += losses[k];
        result.scored_points += scored[k];
        result.skipped_points += skipped[k];
    }
    if (result.scored_points == 0) throw CvError("every held-out point was skipped");
    result.score /= static_cast<double>(result.scored_points);
    return result;
}

CvResult select_bandwidth(const Dataset& data, const CvConfig& config) {
    if (config.candidate_bandwidths.empty()) throw CvError("empty candidate list");
    if (!std::is_sorted(config.candidate_bandwidths.begin(), config.candidate_bandwidths.end()))
        throw CvError("candidate bandwidths must be sorted ascending");
    const double len = data.b - data.a;
    for (double b : config.candidate_bandwidths)
        if (!(b > 0.0) || b >= 0.5 * len) throw CvError("candidate bandwidth outside (0,(b-a)/2)");

    CvResult result;
    result.scores.reserve(config.candidate_bandwidths.size());
    for (double b : config.candidate_bandwidths)
        result.scores.push_back(cv_score(data, b, config.criterion, config.kernel,
                                         config.max_subjects_evaluated, config.threads,
                                         config.approximate, config.approx_grid_size));

    std::size_t best = 0;
    for (std::size_t k = 1; k < result.scores.size(); ++k)
        if (result.scores[k].score < result.scores[best].score) best = k;
    result.b_star = result.scores[best].bandwidth;
    return result;
}

std::vector<double> default_candidates(const Dataset& data, int count) {
    const double len = data.b - data.a;
    const double lo = 2.0 * len / static_cast<double>(data.total_points());
    const double hi = 0.25 * len;
    if (!(lo < hi)) return {hi};
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double t = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
        out.push_back(lo * std::pow(hi / lo, t));
    }
    return out;
}

}  // namespace ladreg
