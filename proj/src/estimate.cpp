#include "ladreg/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ladreg/errors.hpp"
#include "ladreg/parallel.hpp"
#include "ladreg/weighted_median.hpp"

namespace ladreg {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Collects the kernel window into a reusable (target, weight) buffer.
void gather_window(const PooledView& view, double x, double bandwidth, const KernelSpec& kernel,
                   std::vector<std::pair<double, double>>& buf) {
    buf.clear();
    const auto [first, last] = view.window(x - bandwidth, x + bandwidth);
    for (std::size_t i = first; i < last; ++i) {
        const double w = eval_kernel(kernel, (view.x[i] - x) / bandwidth);
        if (w > 0.0) buf.emplace_back(view.y[i], w);
    }
}

double local_median(const PooledView& view, double x, double bandwidth,
                    const KernelSpec& kernel) {
    thread_local std::vector<std::pair<double, double>> buf;
    gather_window(view, x, bandwidth, kernel, buf);
    if (buf.empty())
        throw NoMassError("no kernel mass at x = " + std::to_string(x));
    return weighted_median_inplace(buf);
}

}  // namespace

double fit_mu_raw(const PooledView& view, double x, double bandwidth, const KernelSpec& kernel) {
    return local_median(view, x, bandwidth, kernel);
}

double fit_mu_jackknife(const PooledView& view, double x, double bandwidth,
                        const KernelSpec& kernel) {
    return 2.0 * fit_mu_raw(view, x, bandwidth, kernel) -
           fit_mu_raw(view, x, kSqrt2 * bandwidth, kernel);
}

double fit_s_raw(const PooledView& view, double x, double bandwidth_s, double mu_tilde_at_x,
                 const KernelSpec& kernel) {
    thread_local std::vector<std::pair<double, double>> buf;
    buf.clear();
    const auto [first, last] = view.window(x - bandwidth_s, x + bandwidth_s);
    for (std::size_t i = first; i < last; ++i) {
        const double w = eval_kernel(kernel, (view.x[i] - x) / bandwidth_s);
        if (w > 0.0) buf.emplace_back(std::abs(view.y[i] - mu_tilde_at_x), w);
    }
    if (buf.empty())
        throw NoMassError("no kernel mass at x = " + std::to_string(x));
    return weighted_median_inplace(buf);
}

double fit_s_jackknife(const PooledView& view, double x, double bandwidth_s,
                       double mu_tilde_at_x, const KernelSpec& kernel) {
    return 2.0 * fit_s_raw(view, x, bandwidth_s, mu_tilde_at_x, kernel) -
           fit_s_raw(view, x, kSqrt2 * bandwidth_s, mu_tilde_at_x, kernel);
}

double fit_s_alternative(const PooledView& view, double x, double bandwidth_s,
                         const CurveEstimate& mu_tilde_curve, const KernelSpec& kernel) {
    thread_local std::vector<std::pair<double, double>> buf;
    buf.clear();
    const auto [first, last] = view.window(x - bandwidth_s, x + bandwidth_s);
    for (std::size_t i = first; i < last; ++i) {
        const double w = eval_kernel(kernel, (view.x[i] - x) / bandwidth_s);
        if (w > 0.0)
            buf.emplace_back(std::abs(view.y[i] - mu_tilde_curve.interpolate(view.x[i])), w);
    }
    if (buf.empty())
        throw NoMassError("no kernel mass at x = " + std::to_string(x));
    return weighted_median_inplace(buf);
}

double fit_mu_raw(const Dataset& data, double x, double bandwidth, const KernelSpec& kernel) {
    return fit_mu_raw(PooledView::build(data), x, bandwidth, kernel);
}

double fit_mu_jackknife(const Dataset& data, double x, double bandwidth,
                        const KernelSpec& kernel) {
    return fit_mu_jackknife(PooledView::build(data), x, bandwidth, kernel);
}

double fit_s_raw(const Dataset& data, double x, double bandwidth_s, double mu_tilde_at_x,
                 const KernelSpec& kernel) {
    return fit_s_raw(PooledView::build(data), x, bandwidth_s, mu_tilde_at_x, kernel);
}

double fit_s_jackknife(const Dataset& data, double x, double bandwidth_s, double mu_tilde_at_x,
                       const KernelSpec& kernel) {
    return fit_s_jackknife(PooledView::build(data), x, bandwidth_s, mu_tilde_at_x, kernel);
}

double fit_s_alternative(const Dataset& data, double x, double bandwidth_s,
                         const CurveEstimate& mu_tilde_curve, const KernelSpec& kernel) {
    return fit_s_alternative(PooledView::build(data), x, bandwidth_s, mu_tilde_curve, kernel);
}

double CurveEstimate::interpolate(double x) const {
    if (grid.empty()) throw ExtrapolationError("empty curve");
    if (x < grid.front() || x > grid.back())
        throw ExtrapolationError("x = " + std::to_string(x) + " outside curve hull [" +
                                 std::to_string(grid.front()) + ", " +
                                 std::to_string(grid.back()) + "]");
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    const std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - grid.begin()),
                                                 grid.size() - 1);
    const std::size_t lo = (hi == 0 || grid[hi] == x) ? hi : hi - 1;
    if (lo == hi) {
        if (std::isnan(values[lo]))
            throw ExtrapolationError("curve missing at grid point " + std::to_string(grid[lo]));
        return values[lo];
    }
    if (std::isnan(values[lo]) || std::isnan(values[hi]))
        throw ExtrapolationError("curve missing near x = " + std::to_string(x));
    const double t = (x - grid[lo]) / (grid[hi] - grid[lo]);
    return (1.0 - t) * values[lo] + t * values[hi];
}

int effective_points(const PooledView& view, double x, double bandwidth,
                     const KernelSpec& kernel) {
    const auto [first, last] = view.window(x - bandwidth, x + bandwidth);
    int n = 0;
    for (std::size_t i = first; i < last; ++i)
        if (eval_kernel(kernel, (view.x[i] - x) / bandwidth) > 0.0) ++n;
    return n;
}

double nadaraya_watson(const PooledView& view, double x, double bandwidth,
                       const KernelSpec& kernel) {
    const auto [first, last] = view.window(x - bandwidth, x + bandwidth);
    double num = 0.0, den = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double w = eval_kernel(kernel, (view.x[i] - x) / bandwidth);
        num += w * view.y[i];
        den += w;
    }
    if (den <= 0.0)
        throw NoMassError("no kernel mass at x = " + std::to_string(x));
    return num / den;
}

std::vector<double> make_grid(double lo, double hi, int size) {
    if (size < 1) throw ConfigError("grid size must be >= 1");
    std::vector<double> grid(static_cast<std::size_t>(size));
    if (size == 1) {
        grid[0] = 0.5 * (lo + hi);
        return grid;
    }
    const double step = (hi - lo) / static_cast<double>(size - 1);
    for (int i = 0; i < size; ++i) grid[static_cast<std::size_t>(i)] = lo + step * i;
    return grid;
}

double default_epsilon(const FitConfig& config) {
    return kSqrt2 * std::max(config.bandwidth_mu, config.bandwidth_s);
}

CurvePair fit_curves(const Dataset& data, const FitConfig& config) {
    const double len = data.b - data.a;
    if (!(config.bandwidth_mu > 0.0) || !(config.bandwidth_s > 0.0) ||
        config.bandwidth_mu >= 0.5 * len || config.bandwidth_s >= 0.5 * len)
        throw ConfigError("bandwidths must be positive and below (b-a)/2");

    const double eps = config.epsilon_margin >= 0.0 ? config.epsilon_margin
                                                    : default_epsilon(config);
    std::vector<double> grid = config.grid;
    if (grid.empty()) grid = make_grid(data.a + eps, data.b - eps, config.grid_size);
    for (double x : grid)
        if (x < data.a + eps - 1e-12 || x > data.b - eps + 1e-12)
            throw ConfigError("grid point outside the epsilon-interior");

    const PooledView view = PooledView::build(data);

    CurvePair out;
    out.mu.grid = grid;
    out.mu.values.assign(grid.size(), kNaN);
    out.mu.estimator = EstimatorKind::MuJackknife;
    out.mu.bandwidth = config.bandwidth_mu;
    out.mu.n_effective.assign(grid.size(), 0);
    out.s.grid = grid;
    out.s.values.assign(grid.size(), kNaN);
    out.s.estimator = EstimatorKind::SJackknife;
    out.s.bandwidth = config.bandwidth_s;
    out.s.n_effective.assign(grid.size(), 0);

    std::vector<int> negative(grid.size(), 0);
    parallel_for(grid.size(), config.threads, [&](std::size_t i) {
        const double x = grid[i];
        out.mu.n_effective[i] = effective_points(view, x, config.bandwidth_mu, config.kernel);
        out.s.n_effective[i] = effective_points(view, x, config.bandwidth_s, config.kernel);
        double mu_tilde = kNaN;
        try {
            mu_tilde = fit_mu_jackknife(view, x, config.bandwidth_mu, config.kernel);
            out.mu.values[i] = mu_tilde;
        } catch (const NoMassError&) {
            return;  // grid point marked missing
        }
        try {
            double sv = fit_s_jackknife(view, x, config.bandwidth_s, mu_tilde, config.kernel);
            if (sv < 0.0) {
                negative[i] = 1;
                if (config.clamp_negative_scale) sv = 0.0;
            }
            out.s.values[i] = sv;
        } catch (const NoMassError&) {
        }
    });

    for (int n : negative) out.s.negative_values += n;

    bool any = false;
    for (double v : out.mu.values) any = any || !std::isnan(v);
    if (!any) throw DegenerateFitError("every grid point lacked kernel mass");
    return out;
}

}  // namespace ladreg
