#include "ladreg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ladreg/errors.hpp"
#include "ladreg/rng.hpp"

namespace ladreg {

namespace {

// Weighted step function: F(y) = sum of weights with value <= y.
struct StepCdf {
    std::vector<double> values;   // sorted
    std::vector<double> cum;      // cumulative weights, same length

    static StepCdf build(std::vector<std::pair<double, double>> events) {
        std::sort(events.begin(), events.end());
        StepCdf f;
        f.values.resize(events.size());
        f.cum.resize(events.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < events.size(); ++i) {
            f.values[i] = events[i].first;
            acc += events[i].second;
            f.cum[i] = acc;
        }
        return f;
    }

    double operator()(double y) const {
        const auto it = std::upper_bound(values.begin(), values.end(), y);
        if (it == values.begin()) return 0.0;
        return cum[static_cast<std::size_t>(it - values.begin()) - 1];
    }

    double total() const { return cum.empty() ? 0.0 : cum.back(); }
};

std::vector<std::pair<double, double>> window_events(const Dataset& data, const KernelSpec& kernel,
                                                     double bandwidth, double x) {
    std::vector<std::pair<double, double>> events;
    for (const auto& subj : data.subjects) {
        for (std::size_t j = 0; j < subj.x.size(); ++j) {
            const double w = eval_kernel(kernel, (subj.x[j] - x) / bandwidth);
            if (w > 0.0) events.emplace_back(subj.y[j], w);
        }
    }
    return events;
}

}  // namespace

int default_coupling_lag(std::size_t n_total, double lambda) {
    const int k = static_cast<int>(std::floor(lambda * std::log(static_cast<double>(n_total))));
    return std::max(k, 1);
}

EmpiricalProcessFrame make_frame(const DesignSpec& design, const TrueCurves& curves,
                                 const ErrorModel& model, double bandwidth,
                                 const KernelSpec& kernel, int coupling_lag, std::uint64_t seed) {
    if (coupling_lag < 0) throw ConfigError("coupling lag must be >= 0");
    EmpiricalProcessFrame frame;
    frame.kernel = kernel;
    frame.bandwidth = bandwidth;
    frame.coupling_lag = coupling_lag;
    frame.design = design;
    frame.curves = curves;
    frame.model = model;
    frame.seed = seed;

    const auto xs = generate_design(design, rng::derive(seed, 0xDE51u));
    frame.data.a = frame.coupled.a = design.a;
    frame.data.b = frame.coupled.b = design.b;
    frame.data.subjects.resize(xs.size());
    frame.coupled.subjects.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const CoupledPaths paths = simulate_coupled_errors(model, xs[i].size(), coupling_lag,
                                                           rng::derive(seed, 0xF7A3Eu, i));
        Subject& orig = frame.data.subjects[i];
        Subject& cpl = frame.coupled.subjects[i];
        orig.id = cpl.id = "s" + std::to_string(i + 1);
        orig.x = cpl.x = xs[i];
        orig.y.resize(xs[i].size());
        cpl.y.resize(xs[i].size());
        for (std::size_t j = 0; j < xs[i].size(); ++j) {
            const double m = curves.mu(xs[i][j]);
            const double s = curves.s(xs[i][j]);
            orig.y[j] = m + s * paths.original[j];
            cpl.y[j] = m + s * paths.coupled[j];
        }
    }
    return frame;
}

double eval_F(const EmpiricalProcessFrame& frame, double x, double y, bool use_coupled) {
    const Dataset& data = use_coupled ? frame.coupled : frame.data;
    double acc = 0.0;
    for (const auto& subj : data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j)
            if (subj.y[j] <= y)
                acc += eval_kernel(frame.kernel, (subj.x[j] - x) / frame.bandwidth);
    return acc;
}

double sup_coupling_discrepancy(const EmpiricalProcessFrame& frame,
                                std::span<const double> x_grid,
                                std::span<const double> y_grid) {
    if (x_grid.empty()) throw ConfigError("sup_coupling_discrepancy: empty x grid");
    double sup = 0.0;
    for (double x : x_grid) {
        const StepCdf orig = StepCdf::build(window_events(frame.data, frame.kernel,
                                                          frame.bandwidth, x));
        const StepCdf cpl = StepCdf::build(window_events(frame.coupled, frame.kernel,
                                                         frame.bandwidth, x));
        if (y_grid.empty()) {
            // Walk the union of jump points of both step functions.
            std::vector<double> candidates;
            candidates.reserve(orig.values.size() + cpl.values.size());
            candidates.insert(candidates.end(), orig.values.begin(), orig.values.end());
            candidates.insert(candidates.end(), cpl.values.begin(), cpl.values.end());
            std::sort(candidates.begin(), candidates.end());
            std::size_t io = 0, ic = 0;
            double fo = 0.0, fc = 0.0;
            for (double v : candidates) {
                while (io < orig.values.size() && orig.values[io] <= v) fo = orig.cum[io++];
                while (ic < cpl.values.size() && cpl.values[ic] <= v) fc = cpl.cum[ic++];
                sup = std::max(sup, std::abs(fo - fc));
            }
        } else {
            for (double y : y_grid) sup = std::max(sup, std::abs(orig(y) - cpl(y)));
        }
    }
    return sup;
}

double weight_sum_sq_sup(const EmpiricalProcessFrame& frame, std::span<const double> x_grid) {
    double sup = 0.0;
    for (double x : x_grid) {
        double acc = 0.0;
        for (const auto& subj : frame.data.subjects)
            for (std::size_t j = 0; j < subj.x.size(); ++j) {
                const double w = eval_kernel(frame.kernel, (subj.x[j] - x) / frame.bandwidth);
                acc += w * w;
            }
        sup = std::max(sup, acc);
    }
    return sup;
}

std::vector<ModulusResult> modulus_of_continuity(const EmpiricalProcessFrame& frame,
                                                 std::span<const double> delta_ns,
                                                 std::span<const double> x_grid,
                                                 std::span<const double> y_grid,
                                                 int centering_reps) {
    if (x_grid.empty()) throw ConfigError("modulus_of_continuity: empty x grid");
    if (centering_reps < 2) throw ConfigError("modulus_of_continuity: need >= 2 centering reps");
    for (double d : delta_ns)
        if (d < 0.0) throw ConfigError("modulus_of_continuity: delta must be >= 0");

    const double phi_n = weight_sum_sq_sup(frame, x_grid);

    // Fresh replications of the error paths at the fixed design, stored per
    // subject; only these enter the centering estimate.
    const std::size_t r_total = static_cast<std::size_t>(centering_reps);
    const std::size_t n_subjects = frame.data.subjects.size();
    std::vector<std::vector<std::vector<double>>> rep_y(r_total);
    for (std::size_t r = 0; r < r_total; ++r) {
        rep_y[r].resize(n_subjects);
        for (std::size_t i = 0; i < n_subjects; ++i) {
            const Subject& subj = frame.data.subjects[i];
            const std::vector<double> e = simulate_errors(
                frame.model, subj.x.size(), 1000, rng::derive(frame.seed, 0xCE27E4u, r, i));
            auto& y = rep_y[r][i];
            y.resize(subj.x.size());
            for (std::size_t j = 0; j < subj.x.size(); ++j)
                y[j] = frame.curves.mu(subj.x[j]) + frame.curves.s(subj.x[j]) * e[j];
        }
    }

    std::vector<ModulusResult> results(delta_ns.size());
    for (std::size_t d = 0; d < delta_ns.size(); ++d) {
        results[d].delta_n = delta_ns[d];
        results[d].phi_n = phi_n;
    }

    const double inv_r = 1.0 / static_cast<double>(r_total);
    for (double x : x_grid) {
        const StepCdf observed = StepCdf::build(window_events(frame.data, frame.kernel,
                                                              frame.bandwidth, x));

        // Pooled centering sample: every replication's window values with
        // weight w/R, one sorted pass for all queries at this x.
        std::vector<std::pair<double, double>> pooled;
        for (std::size_t i = 0; i < n_subjects; ++i) {
            const Subject& subj = frame.data.subjects[i];
            for (std::size_t j = 0; j < subj.x.size(); ++j) {
                const double w = eval_kernel(frame.kernel, (subj.x[j] - x) / frame.bandwidth);
                if (w <= 0.0) continue;
                for (std::size_t r = 0; r < r_total; ++r)
                    pooled.emplace_back(rep_y[r][i][j], w * inv_r);
            }
        }
        const StepCdf centering = StepCdf::build(std::move(pooled));

        for (std::size_t d = 0; d < delta_ns.size(); ++d) {
            const double delta_n = delta_ns[d];
            if (delta_n == 0.0) continue;  // D_n(0,.,.) = 0 by definition
            for (double delta : {0.25 * delta_n, 0.5 * delta_n, delta_n}) {
                auto probe = [&](double y) {
                    const double dn = (observed(y + delta) - centering(y + delta)) -
                                      (observed(y) - centering(y));
                    if (std::abs(dn) > results[d].sup_abs) {
                        results[d].sup_abs = std::abs(dn);
                        results[d].arg_x = x;
                        results[d].arg_y = y;
                        results[d].arg_delta = delta;
                    }
                };
                if (y_grid.empty()) {
                    for (double v : observed.values) {
                        probe(v);
                        probe(v - delta);
                    }
                } else {
                    for (double y : y_grid) probe(y);
                }
            }
        }
    }

    // MC error of the centering at each argmax: spread of the per-replication
    // increments F_r(y*+delta*) - F_r(y*).
    for (auto& res : results) {
        if (res.sup_abs <= 0.0) continue;
        std::vector<double> incr(r_total, 0.0);
        for (std::size_t i = 0; i < n_subjects; ++i) {
            const Subject& subj = frame.data.subjects[i];
            for (std::size_t j = 0; j < subj.x.size(); ++j) {
                const double w =
                    eval_kernel(frame.kernel, (subj.x[j] - res.arg_x) / frame.bandwidth);
                if (w <= 0.0) continue;
                for (std::size_t r = 0; r < r_total; ++r) {
                    const double y = rep_y[r][i][j];
                    if (y > res.arg_y && y <= res.arg_y + res.arg_delta) incr[r] += w;
                }
            }
        }
        double mean = std::accumulate(incr.begin(), incr.end(), 0.0) * inv_r;
        double var = 0.0;
        for (double v : incr) var += (v - mean) * (v - mean);
        var /= static_cast<double>(r_total - 1);
        res.centering_se = std::sqrt(var * inv_r);
    }
    return results;
}

ModulusResult modulus_of_continuity(const EmpiricalProcessFrame& frame, double delta_n,
                                    std::span<const double> x_grid,
                                    std::span<const double> y_grid, int centering_reps) {
    const double deltas[1] = {delta_n};
    return modulus_of_continuity(frame, deltas, x_grid, y_grid, centering_reps).front();
}

}  // namespace ladreg
