#include "ladreg/asym.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

#include "ladreg/errors.hpp"
#include "ladreg/parallel.hpp"
#include "ladreg/rng.hpp"
#include "ladreg/weighted_median.hpp"

namespace ladreg {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

double median_abs(std::vector<double> v) {
    for (double& x : v) x = std::abs(x);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Fixed design dealt once; replications only redraw the error paths.
struct FixedDesign {
    std::vector<double> x;                              // pooled, sorted
    std::vector<std::pair<std::size_t, std::size_t>> owner;  // (subject, index in path)
    std::vector<std::size_t> sizes;
    double a = 0.0, b = 1.0;

    static FixedDesign build(const DesignSpec& spec, std::uint64_t seed) {
        const auto xs = generate_design(spec, rng::derive(seed, 0xDE51u));
        FixedDesign d;
        d.a = spec.a;
        d.b = spec.b;
        std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> pooled;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            d.sizes.push_back(xs[i].size());
            for (std::size_t j = 0; j < xs[i].size(); ++j)
                pooled.push_back({xs[i][j], {i, j}});
        }
        std::stable_sort(pooled.begin(), pooled.end(),
                         [](const auto& l, const auto& r) { return l.first < r.first; });
        d.x.reserve(pooled.size());
        d.owner.reserve(pooled.size());
        for (const auto& [xv, who] : pooled) {
            d.x.push_back(xv);
            d.owner.push_back(who);
        }
        return d;
    }

    std::size_t total() const { return x.size(); }

    // Pooled responses for one replication.
    std::vector<double> simulate_y(const TrueCurves& curves, const ErrorModel& model,
                                   std::uint64_t rep_seed) const {
        std::vector<std::vector<double>> errors(sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i)
            errors[i] = simulate_errors(model, sizes[i], 1000, rng::derive(rep_seed, 0x5CB17u, i));
        std::vector<double> y(x.size());
        for (std::size_t p = 0; p < x.size(); ++p) {
            const auto [i, j] = owner[p];
            y[p] = curves.mu(x[p]) + curves.s(x[p]) * errors[i][j];
        }
        return y;
    }
};

// Kernel weights over the pooled design at one evaluation point.
struct WindowWeights {
    std::size_t first = 0;
    std::vector<double> w;

    static WindowWeights build(const FixedDesign& design, double x, double bandwidth,
                               const KernelSpec& kernel) {
        WindowWeights ww;
        const auto lo = std::lower_bound(design.x.begin(), design.x.end(), x - bandwidth);
        const auto hi = std::upper_bound(design.x.begin(), design.x.end(), x + bandwidth);
        ww.first = static_cast<std::size_t>(lo - design.x.begin());
        ww.w.reserve(static_cast<std::size_t>(hi - lo));
        for (auto it = lo; it != hi; ++it)
            ww.w.push_back(eval_kernel(kernel, (*it - x) / bandwidth));
        return ww;
    }

    double median_of(const std::vector<double>& y) const {
        thread_local std::vector<std::pair<double, double>> buf;
        buf.clear();
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] > 0.0) buf.emplace_back(y[first + k], w[k]);
        if (buf.empty()) throw NoMassError("no kernel mass in verification window");
        return weighted_median_inplace(buf);
    }

    double abs_residual_median_of(const std::vector<double>& y, double center) const {
        thread_local std::vector<std::pair<double, double>> buf;
        buf.clear();
        for (std::size_t k = 0; k < w.size(); ++k)
            if (w[k] > 0.0) buf.emplace_back(std::abs(y[first + k] - center), w[k]);
        if (buf.empty()) throw NoMassError("no kernel mass in verification window");
        return weighted_median_inplace(buf);
    }
};

void summarize_normalized(McReport& report, const std::vector<double>& stats, double ci_halfwidth,
                          const std::vector<double>& centered) {
    double mean = 0.0;
    for (double z : stats) mean += z;
    mean /= static_cast<double>(stats.size());
    double var = 0.0;
    for (double z : stats) var += (z - mean) * (z - mean);
    var /= static_cast<double>(stats.size() - 1);
    report.empirical_variance = var;
    report.variance_ratio = var / report.theoretical_variance;

    int covered = 0;
    for (double c : centered)
        if (std::abs(c) <= ci_halfwidth) ++covered;
    report.ci_coverage = static_cast<double>(covered) / static_cast<double>(centered.size());

    std::vector<double> standardized(stats.size());
    const double sd = std::sqrt(report.theoretical_variance);
    for (std::size_t i = 0; i < stats.size(); ++i) standardized[i] = stats[i] / sd;
    report.ad_statistic = anderson_darling(std::move(standardized));
}

}  // namespace

TheoryContext make_theory_context(const TrueCurves& curves, double domain_length,
                                  const KernelSpec& kernel) {
    TheoryContext ctx;
    ctx.curves = curves;
    ctx.domain_length = domain_length;
    ctx.kernel = kernel;
    ctx.kappa_plus = curves.law.fm1 + curves.law.f1;
    if (!(ctx.kappa_plus > 0.0))
        throw ConfigError("error law violates f_e(-1) + f_e(1) > 0");
    ctx.kappa = (curves.law.f1 - curves.law.fm1) / ctx.kappa_plus;
    ctx.F_e_minus1 = curves.law.F_m1;
    return ctx;
}

double rho_mu(const TheoryContext& ctx, double x) {
    const auto& c = ctx.curves;
    const double sx = c.s(x);
    return c.mu_d2(x) -
           (c.mu_d1(x) * c.law.fprime0 / c.law.f0 + 2.0 * c.s_d1(x)) * c.mu_d1(x) / sx;
}

double rho_s(const TheoryContext& ctx, double x) {
    const auto& c = ctx.curves;
    const double sx = c.s(x);
    const double sp = c.s_d1(x);
    const double mp = c.mu_d1(x);
    const double plus = sp + mp;
    const double minus = sp - mp;
    return c.s_d2(x) - 2.0 * sp * sp / sx +
           ctx.kappa * (c.mu_d2(x) - 2.0 * mp * sp / sx) -
           (c.law.fprime1 * plus * plus - c.law.fprime_m1 * minus * minus) /
               (ctx.kappa_plus * sx);
}

double asymptotic_variance_mu(const TheoryContext& ctx, double x, bool jackknife) {
    const double phi = jackknife ? ctx.kernel.phi_kstar : ctx.kernel.phi_k;
    const double sx = ctx.curves.s(x);
    const double f0 = ctx.curves.law.f0;
    return phi * ctx.domain_length * sx * sx / (4.0 * f0 * f0);
}

double asymptotic_variance_s(const TheoryContext& ctx, double x, double c_ratio) {
    const double sx = ctx.curves.s(x);
    const double f0 = ctx.curves.law.f0;
    if (std::isinf(c_ratio)) {
        if (ctx.kappa == 0.0)
            return ctx.kernel.phi_k * ctx.domain_length * sx * sx /
                   (4.0 * ctx.kappa_plus * ctx.kappa_plus);
        // (N_n b_n)-scaled regime: the T term dominates.
        return ctx.kernel.phi_kstar * ctx.kappa * ctx.kappa * ctx.domain_length * sx * sx /
               (4.0 * f0 * f0);
    }
    if (c_ratio < 0.0) throw ConfigError("bandwidth ratio must be >= 0");
    const double cross = (ctx.kappa == 0.0 || c_ratio == 0.0)
                             ? 0.0
                             : integral_k_kstar(ctx.kernel, c_ratio);
    const double brace = ctx.kernel.phi_k / (ctx.kappa_plus * ctx.kappa_plus) +
                         c_ratio * c_ratio * ctx.kappa * ctx.kappa * ctx.kernel.phi_kstar /
                             (f0 * f0) -
                         2.0 * c_ratio * ctx.kappa * (1.0 - 4.0 * ctx.F_e_minus1) /
                             (ctx.kappa_plus * f0) * cross;
    return ctx.domain_length * sx * sx / 4.0 * brace;
}

double optimal_bandwidth(const TheoryContext& ctx, double x, double n_total) {
    const double rho = rho_mu(ctx, x);
    if (rho == 0.0 || !std::isfinite(rho))
        throw DegenerateBiasError("rho_mu(x) = 0: no finite MSE-optimal bandwidth");
    const double sx = ctx.curves.s(x);
    const double f0 = ctx.curves.law.f0;
    const double num = ctx.kernel.phi_k * ctx.domain_length * sx * sx;
    const double den = 4.0 * ctx.kernel.psi_k * ctx.kernel.psi_k * rho * rho * f0 * f0;
    return std::pow(num / den, 0.2) * std::pow(n_total, -0.2);
}

double anderson_darling(std::vector<double> standardized) {
    std::sort(standardized.begin(), standardized.end());
    const boost::math::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = standardized.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = std::clamp(boost::math::cdf(normal, standardized[i]), 1e-300,
                                     1.0 - 1e-16);
        const double hi = std::clamp(boost::math::cdf(normal, standardized[n - 1 - i]), 1e-300,
                                     1.0 - 1e-16);
        acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log1p(-hi));
    }
    return -static_cast<double>(n) - acc / static_cast<double>(n);
}

McReport verify_clt_mu(const DesignSpec& design, const TrueCurves& curves,
                       const ErrorModel& model, double x, const CltMuOptions& options,
                       std::uint64_t seed) {
    if (options.replications < 100)
        throw ConfigError("verify_clt_mu: need at least 100 replications");

    const FixedDesign fixed = FixedDesign::build(design, seed);
    const double n_total = static_cast<double>(fixed.total());

    const KernelSpec kernel =
        options.kernel.phi_k > 0.0 ? options.kernel : make_kernel(options.kernel.family);
    TheoryContext full_ctx = make_theory_context(curves, design.b - design.a, kernel);

    const double bandwidth = options.fixed_bandwidth > 0.0
                                 ? options.fixed_bandwidth
                                 : optimal_bandwidth(full_ctx, x, n_total);
    const bool jackknife = options.estimator == MuEstimator::Jackknife;
    const double bias = jackknife ? 0.0
                                  : kernel.psi_k * rho_mu(full_ctx, x) * bandwidth * bandwidth;

    const WindowWeights win = WindowWeights::build(fixed, x, bandwidth, kernel);
    const WindowWeights win_wide = WindowWeights::build(fixed, x, kSqrt2 * bandwidth, kernel);

    McReport report;
    report.replications = options.replications;
    report.bandwidth = bandwidth;
    report.target = curves.mu(x);
    report.theoretical_variance = asymptotic_variance_mu(full_ctx, x, jackknife);

    const std::size_t reps = static_cast<std::size_t>(options.replications);
    std::vector<double> estimates(reps, std::numeric_limits<double>::quiet_NaN());
    parallel_for(reps, options.threads, [&](std::size_t r) {
        const std::vector<double> y =
            fixed.simulate_y(curves, model, rng::derive(seed, 0x4E9u, r));
        try {
            const double fit_b = win.median_of(y);
            estimates[r] = jackknife ? 2.0 * fit_b - win_wide.median_of(y) : fit_b;
        } catch (const NoMassError&) {
        }
    });

    std::vector<double> stats, centered;
    const double scale = std::sqrt(n_total * bandwidth);
    double bias_acc = 0.0;
    for (double est : estimates) {
        if (std::isnan(est)) {
            ++report.failures;
            continue;
        }
        report.per_rep_estimates.push_back(est);
        bias_acc += est - report.target;
        stats.push_back(scale * (est - report.target - bias));
        centered.push_back(est - bias - report.target);
    }
    if (report.failures * 100 >= options.replications)
        throw DegenerateFitError("verify_clt_mu: more than 1% of replications failed");
    report.empirical_bias = bias_acc / static_cast<double>(report.per_rep_estimates.size());

    const double ci_halfwidth =
        1.959963984540054 * std::sqrt(report.theoretical_variance / (n_total * bandwidth));
    summarize_normalized(report, stats, ci_halfwidth, centered);
    return report;
}

McReport verify_clt_s(const DesignSpec& design, const TrueCurves& curves,
                      const ErrorModel& model, double x, double bandwidth_mu,
                      double bandwidth_s, int replications, int threads, std::uint64_t seed) {
    if (replications < 100) throw ConfigError("verify_clt_s: need at least 100 replications");
    const KernelSpec kernel = make_kernel(KernelFamily::Epanechnikov);
    TheoryContext ctx = make_theory_context(curves, design.b - design.a, kernel);

    const FixedDesign fixed = FixedDesign::build(design, seed);
    const double n_total = static_cast<double>(fixed.total());

    const WindowWeights mu_win = WindowWeights::build(fixed, x, bandwidth_mu, kernel);
    const WindowWeights mu_wide = WindowWeights::build(fixed, x, kSqrt2 * bandwidth_mu, kernel);
    const WindowWeights s_win = WindowWeights::build(fixed, x, bandwidth_s, kernel);

    McReport report;
    report.replications = replications;
    report.bandwidth = bandwidth_s;
    report.target = curves.s(x);
    report.theoretical_variance = asymptotic_variance_s(ctx, x, bandwidth_s / bandwidth_mu);
    const double bias = kernel.psi_k * rho_s(ctx, x) * bandwidth_s * bandwidth_s;

    const std::size_t reps = static_cast<std::size_t>(replications);
    std::vector<double> estimates(reps, std::numeric_limits<double>::quiet_NaN());
    parallel_for(reps, threads, [&](std::size_t r) {
        const std::vector<double> y =
            fixed.simulate_y(curves, model, rng::derive(seed, 0x4E9u, r));
        try {
            const double mu_tilde = 2.0 * mu_win.median_of(y) - mu_wide.median_of(y);
            estimates[r] = s_win.abs_residual_median_of(y, mu_tilde);
        } catch (const NoMassError&) {
        }
    });

    std::vector<double> stats, centered;
    const double scale = std::sqrt(n_total * bandwidth_s);
    double bias_acc = 0.0;
    for (double est : estimates) {
        if (std::isnan(est)) {
            ++report.failures;
            continue;
        }
        report.per_rep_estimates.push_back(est);
        bias_acc += est - report.target;
        stats.push_back(scale * (est - report.target - bias));
        centered.push_back(est - bias - report.target);
    }
    if (report.failures * 100 >= replications)
        throw DegenerateFitError("verify_clt_s: more than 1% of replications failed");
    report.empirical_bias = bias_acc / static_cast<double>(report.per_rep_estimates.size());

    const double ci_halfwidth =
        1.959963984540054 * std::sqrt(report.theoretical_variance / (n_total * bandwidth_s));
    summarize_normalized(report, stats, ci_halfwidth, centered);
    return report;
}

std::vector<BahadurRow> verify_bahadur_remainder(std::span<const DesignSpec> designs,
                                                 const TrueCurves& curves,
                                                 const ErrorModel& model, double x,
                                                 int replications, int threads,
                                                 std::uint64_t seed) {
    if (replications < 10) throw ConfigError("verify_bahadur_remainder: too few replications");
    const KernelSpec kernel = make_kernel(KernelFamily::Epanechnikov);

    std::vector<BahadurRow> rows;
    const std::size_t reps = static_cast<std::size_t>(replications);

    for (std::size_t d = 0; d < designs.size(); ++d) {
        const DesignSpec& design = designs[d];
        TheoryContext local = make_theory_context(curves, design.b - design.a, kernel);
        const FixedDesign fixed = FixedDesign::build(design, rng::derive(seed, d));
        const double n_total = static_cast<double>(fixed.total());
        const double bandwidth = optimal_bandwidth(local, x, n_total);
        const WindowWeights win = WindowWeights::build(fixed, x, bandwidth, kernel);

        // Deterministic centering of the indicator sum: E 1{Y <= mu(x)} at
        // each design point from the known standardized error law.
        const double mu_x = curves.mu(x);
        std::vector<double> expected(win.w.size());
        for (std::size_t k = 0; k < win.w.size(); ++k) {
            const double xp = fixed.x[win.first + k];
            expected[k] = error_cdf(model, (mu_x - curves.mu(xp)) / curves.s(xp));
        }

        const double bias = kernel.psi_k * rho_mu(local, x) * bandwidth * bandwidth;
        const double lead_coeff =
            local.domain_length * curves.s(x) / (curves.law.f0 * n_total * bandwidth);

        std::vector<double> remainders(reps), leadings(reps), qs(reps);
        parallel_for(reps, threads, [&](std::size_t r) {
            const std::vector<double> y =
                fixed.simulate_y(curves, model, rng::derive(seed, 0xBA4Au, d, r));
            const double est = win.median_of(y);
            double q = 0.0;
            for (std::size_t k = 0; k < win.w.size(); ++k) {
                const double ind = y[win.first + k] <= mu_x ? 1.0 : 0.0;
                q -= (ind - expected[k]) * win.w[k];
            }
            qs[r] = q;
            leadings[r] = lead_coeff * q;
            remainders[r] = est - mu_x - bias - leadings[r];
        });

        BahadurRow row;
        row.n_total = n_total;
        row.bandwidth = bandwidth;
        row.median_abs_remainder = median_abs(remainders);
        row.median_abs_leading = median_abs(leadings);
        row.remainder_ratio = row.median_abs_remainder / row.median_abs_leading;

        double q_mean = 0.0;
        for (double q : qs) q_mean += q;
        q_mean /= static_cast<double>(reps);
        double q_var = 0.0;
        for (double q : qs) q_var += (q - q_mean) * (q - q_mean);
        q_var /= static_cast<double>(reps - 1);
        row.q_mean_in_se = q_mean / std::sqrt(q_var / static_cast<double>(reps));

        double lead_mean = 0.0;
        for (double l : leadings) lead_mean += l;
        lead_mean /= static_cast<double>(reps);
        double lead_var = 0.0;
        for (double l : leadings) lead_var += (l - lead_mean) * (l - lead_mean);
        lead_var /= static_cast<double>(reps - 1);
        const double lead_var_pred =
            asymptotic_variance_mu(local, x, false) / (n_total * bandwidth);
        row.leading_variance_ratio = lead_var / lead_var_pred;

        rows.push_back(row);
    }
    return rows;
}

}  // namespace ladreg
