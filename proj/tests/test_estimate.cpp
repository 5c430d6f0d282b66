#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ladreg/curves.hpp"
#include "ladreg/dataset.hpp"
#include "ladreg/errors.hpp"
#include "ladreg/estimate.hpp"
#include "ladreg/weighted_median.hpp"

using namespace ladreg;

namespace {

const KernelSpec kEpan = make_kernel(KernelFamily::Epanechnikov);

Dataset constant_dataset(double value, int n_subjects = 3, int m = 30) {
    const ErrorModel model = make_iid();
    const TrueCurves curves = constant_curves(value, 1.0, model);
    Dataset data = synthesize_dataset(uniform_design(n_subjects, m), curves, model, 5);
    for (auto& subj : data.subjects)
        for (auto& y : subj.y) y = value;
    return data;
}

Dataset noise_free_sin(int n_subjects = 4, int m = 60) {
    Dataset data;
    const auto xs = generate_design(uniform_design(n_subjects, m), 3);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Subject subj;
        subj.id = "s" + std::to_string(i);
        subj.x = xs[i];
        for (double x : subj.x) subj.y.push_back(std::sin(6.283185307179586 * x));
        data.subjects.push_back(subj);
    }
    return data;
}

Dataset random_dataset(std::mt19937_64& gen, int n_subjects, int m) {
    Dataset data;
    std::uniform_real_distribution<double> xd(0.0, 1.0), yd(-3.0, 3.0);
    for (int i = 0; i < n_subjects; ++i) {
        Subject subj;
        subj.id = "s" + std::to_string(i);
        for (int j = 0; j < m; ++j) subj.x.push_back(xd(gen));
        std::sort(subj.x.begin(), subj.x.end());
        for (int j = 0; j < m; ++j) subj.y.push_back(yd(gen));
        data.subjects.push_back(subj);
    }
    return data;
}

// Independent oracle: assemble the weighted L1 problem straight from the
// Dataset and minimize over the candidate set by objective evaluation.
double oracle_mu(const Dataset& data, double x, double bandwidth) {
    WeightedSample sample;
    for (const auto& subj : data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j) {
            const double w = eval_kernel(kEpan, (subj.x[j] - x) / bandwidth);
            if (w > 0.0) {
                sample.values.push_back(subj.y[j]);
                sample.weights.push_back(w);
            }
        }
    std::vector<double> candidates = sample.values;
    std::sort(candidates.begin(), candidates.end());
    double best = candidates.front(), best_obj = lad_objective(sample, best);
    for (double theta : candidates) {
        const double obj = lad_objective(sample, theta);
        if (obj < best_obj - 1e-12 * (1.0 + best_obj)) {
            best_obj = obj;
            best = theta;
        }
    }
    return best;
}

double oracle_s(const Dataset& data, double x, double bandwidth, double center) {
    WeightedSample sample;
    for (const auto& subj : data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j) {
            const double w = eval_kernel(kEpan, (subj.x[j] - x) / bandwidth);
            if (w > 0.0) {
                sample.values.push_back(std::abs(subj.y[j] - center));
                sample.weights.push_back(w);
            }
        }
    std::vector<double> candidates = sample.values;
    std::sort(candidates.begin(), candidates.end());
    double best = candidates.front(), best_obj = lad_objective(sample, best);
    for (double theta : candidates) {
        const double obj = lad_objective(sample, theta);
        if (obj < best_obj - 1e-12 * (1.0 + best_obj)) {
            best_obj = obj;
            best = theta;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("constant data fits exactly") {
    const Dataset data = constant_dataset(5.0);
    for (double x : {0.2, 0.5, 0.8}) {
        CHECK(fit_mu_raw(data, x, 0.15, kEpan) == 5.0);
        CHECK(fit_mu_jackknife(data, x, 0.15, kEpan) == 5.0);
    }
}

TEST_CASE("noise-free data: error bounded by the window modulus") {
    const Dataset data = noise_free_sin();
    const double b = 0.1;
    for (double x = 0.15; x <= 0.85; x += 0.05) {
        const double fit = fit_mu_raw(data, x, b, kEpan);
        double modulus = 0.0;
        for (double u = -b; u <= b; u += b / 50.0)
            modulus = std::max(modulus, std::abs(std::sin(6.283185307179586 * (x + u)) -
                                                 std::sin(6.283185307179586 * x)));
        CHECK(std::abs(fit - std::sin(6.283185307179586 * x)) <= modulus + 1e-12);
    }
}

TEST_CASE("oracle equivalence for the location fit") {
    std::mt19937_64 gen(2025);
    int compared = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const Dataset data = random_dataset(gen, 1 + trial % 5, 10 + 7 * (trial % 4));
        const double x = 0.25 + 0.5 * (trial % 10) / 10.0;
        const double b = 0.12 + 0.02 * (trial % 3);
        try {
            const double got = fit_mu_raw(data, x, b, kEpan);
            CHECK(got == oracle_mu(data, x, b));
            ++compared;
        } catch (const NoMassError&) {
            // empty window: nothing to compare
        }
    }
    CHECK(compared > 15);
}

TEST_CASE("oracle equivalence for the scale fits") {
    std::mt19937_64 gen(404);
    int compared = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const Dataset data = random_dataset(gen, 2 + trial % 4, 12 + 5 * (trial % 3));
        const double x = 0.3 + 0.4 * (trial % 8) / 8.0;
        const double h = 0.15;
        const double center = -0.5 + 0.1 * trial;
        try {
            const double got = fit_s_raw(data, x, h, center, kEpan);
            CHECK(got == oracle_s(data, x, h, center));
            ++compared;
        } catch (const NoMassError&) {
        }
    }
    CHECK(compared > 15);
}

TEST_CASE("scale fit with symmetric residuals picks the smaller median") {
    // Residuals {-2,-1,1,2} at the evaluation point: |r| sorted {1,1,2,2},
    // cumulative weight reaches half at the second 1.
    Dataset data;
    Subject subj;
    subj.id = "s";
    subj.x = {0.5, 0.5, 0.5, 0.5};
    subj.y = {-2.0, -1.0, 1.0, 2.0};
    data.subjects.push_back(subj);
    CHECK(fit_s_raw(data, 0.5, 0.1, 0.0, kEpan) == 1.0);
}

TEST_CASE("noise-free scale fit is zero; equal residuals are a fixed point") {
    const Dataset data = noise_free_sin();
    for (double x : {0.3, 0.5, 0.7}) {
        const double mu = fit_mu_raw(data, x, 0.08, kEpan);
        (void)mu;
        // Exact mu supplied: every residual is |sin - sin| = 0 only at the
        // design points themselves, so use constant data instead.
    }
    const Dataset flat = constant_dataset(2.0);
    CHECK(fit_s_raw(flat, 0.5, 0.1, 2.0, kEpan) == 0.0);
    CHECK(fit_s_jackknife(flat, 0.5, 0.1, 2.0, kEpan) == 0.0);
    // Residuals all equal to c > 0: jackknife returns 2c - c = c.
    CHECK(fit_s_raw(flat, 0.5, 0.1, 1.25, kEpan) == 0.75);
    CHECK(fit_s_jackknife(flat, 0.5, 0.1, 1.25, kEpan) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("alternative scale estimator equals the raw one for a flat curve") {
    std::mt19937_64 gen(77);
    const Dataset data = random_dataset(gen, 3, 25);
    CurveEstimate flat;
    flat.grid = {0.0, 0.5, 1.0};
    flat.values = {1.5, 1.5, 1.5};
    const double got = fit_s_alternative(data, 0.5, 0.12, flat, kEpan);
    CHECK(got == fit_s_raw(data, 0.5, 0.12, 1.5, kEpan));
}

TEST_CASE("alternative scale estimator matches its own oracle") {
    std::mt19937_64 gen(78);
    const Dataset data = random_dataset(gen, 3, 30);
    CurveEstimate line;
    line.grid = make_grid(0.0, 1.0, 51);
    line.values.resize(line.grid.size());
    for (std::size_t g = 0; g < line.grid.size(); ++g) line.values[g] = 0.3 + 0.2 * line.grid[g];
    const double h = 0.15, x = 0.45;

    WeightedSample sample;
    for (const auto& subj : data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j) {
            const double w = eval_kernel(kEpan, (subj.x[j] - x) / h);
            if (w > 0.0) {
                sample.values.push_back(std::abs(subj.y[j] - (0.3 + 0.2 * subj.x[j])));
                sample.weights.push_back(w);
            }
        }
    const double got = fit_s_alternative(data, x, h, line, kEpan);
    // The piecewise-linear interpolant of a linear curve is the curve itself.
    CHECK(lad_objective(sample, got) ==
          doctest::Approx(lad_objective(sample, weighted_median(sample))).epsilon(1e-12));
}

TEST_CASE("location and scale equivariance") {
    std::mt19937_64 gen(909);
    const Dataset data = random_dataset(gen, 3, 40);
    const double x = 0.5, b = 0.15;
    const double base_mu = fit_mu_raw(data, x, b, kEpan);
    const double base_mu_j = fit_mu_jackknife(data, x, b, kEpan);
    const double base_s = fit_s_raw(data, x, b, base_mu_j, kEpan);

    Dataset shifted = data;
    for (auto& subj : shifted.subjects)
        for (auto& y : subj.y) y += 3.25;
    CHECK(fit_mu_raw(shifted, x, b, kEpan) == base_mu + 3.25);
    CHECK(fit_mu_jackknife(shifted, x, b, kEpan) ==
          doctest::Approx(base_mu_j + 3.25).epsilon(1e-15));
    CHECK(fit_s_raw(shifted, x, b, base_mu_j + 3.25, kEpan) == base_s);

    Dataset scaled = data;
    for (auto& subj : scaled.subjects)
        for (auto& y : subj.y) y *= 2.0;
    CHECK(fit_mu_raw(scaled, x, b, kEpan) == 2.0 * base_mu);
    CHECK(fit_s_raw(scaled, x, b, 2.0 * base_mu_j, kEpan) == 2.0 * base_s);
}

TEST_CASE("bounded influence of a single outlier") {
    std::mt19937_64 gen(31337);
    Dataset data = random_dataset(gen, 2, 60);
    const double x = 0.5, b = 0.2;
    const PooledView view = PooledView::build(data);
    const auto [first, last] = view.window(x - b, x + b);
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = first; i < last; ++i) {
        lo = std::min(lo, view.y[i]);
        hi = std::max(hi, view.y[i]);
    }
    const double base_lad = fit_mu_raw(data, x, b, kEpan);
    const double base_mean = nadaraya_watson(view, x, b, kEpan);

    // Blow up one in-window observation.
    for (auto& subj : data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j)
            if (std::abs(subj.x[j] - x) < 0.5 * b) {
                subj.y[j] = 1e6;
                goto done;
            }
done:
    const PooledView poisoned = PooledView::build(data);
    const double lad_shift = std::abs(fit_mu_raw(data, x, b, kEpan) - base_lad);
    const double mean_shift = std::abs(nadaraya_watson(poisoned, x, b, kEpan) - base_mean);
    CHECK(lad_shift <= (hi - lo) + 1e-9);
    CHECK(mean_shift > 1000.0);
}

TEST_CASE("monotone bandwidth mass") {
    std::mt19937_64 gen(555);
    const Dataset data = random_dataset(gen, 3, 35);
    const PooledView view = PooledView::build(data);
    for (double x : {0.25, 0.5, 0.75}) {
        int prev = 0;
        for (double b = 0.02; b <= 0.4; b += 0.02) {
            const int n_eff = effective_points(view, x, b, kEpan);
            CHECK(n_eff >= prev);
            prev = n_eff;
        }
    }
}

TEST_CASE("fit_curves on noise-free data") {
    const Dataset data = noise_free_sin(6, 80);
    FitConfig config;
    config.bandwidth_mu = 0.08;
    config.bandwidth_s = 0.08;
    config.kernel = kEpan;
    config.grid_size = 41;
    const CurvePair fit = fit_curves(data, config);
    REQUIRE(fit.mu.grid.size() == 41);
    for (std::size_t g = 0; g < fit.mu.grid.size(); ++g) {
        const double x = fit.mu.grid[g];
        CHECK(fit.mu.n_effective[g] > 0);
        // Jackknife window modulus at sqrt(2) b.
        const double wb = 0.08 * 1.4142135623730951;
        double modulus = 0.0;
        for (double u = -wb; u <= wb; u += wb / 50.0)
            modulus = std::max(modulus, std::abs(std::sin(6.283185307179586 * (x + u)) -
                                                 std::sin(6.283185307179586 * x)));
        CHECK(std::abs(fit.mu.values[g] - std::sin(6.283185307179586 * x)) <=
              3.0 * modulus + 1e-12);
        // Scale of noise-free data is 0 up to the location-fit bias.
        CHECK(std::abs(fit.s.values[g]) <= 3.0 * modulus + 1e-12);
    }
}

TEST_CASE("fit_curves determinism") {
    const ErrorModel model = make_iid();
    const Dataset data =
        synthesize_dataset(uniform_design(10, 50), default_test_curves(model), model, 12);
    FitConfig config;
    config.bandwidth_mu = 0.1;
    config.bandwidth_s = 0.12;
    config.kernel = kEpan;
    config.threads = 4;
    const CurvePair a = fit_curves(data, config);
    const CurvePair b = fit_curves(data, config);
    for (std::size_t g = 0; g < a.mu.values.size(); ++g) {
        const bool mu_same = a.mu.values[g] == b.mu.values[g] ||
                             (std::isnan(a.mu.values[g]) && std::isnan(b.mu.values[g]));
        CHECK(mu_same);
        const bool s_same = a.s.values[g] == b.s.values[g] ||
                            (std::isnan(a.s.values[g]) && std::isnan(b.s.values[g]));
        CHECK(s_same);
    }
}

TEST_CASE("fit_curves marks empty grid points missing") {
    // Two clusters far apart leave a hole in the middle.
    Dataset data;
    Subject subj;
    subj.id = "s";
    for (int j = 0; j < 50; ++j) {
        subj.x.push_back(j < 25 ? 0.05 + 0.004 * j : 0.85 + 0.004 * (j - 25));
        subj.y.push_back(1.0);
    }
    data.subjects.push_back(subj);

    FitConfig config;
    config.bandwidth_mu = 0.04;
    config.bandwidth_s = 0.04;
    config.kernel = kEpan;
    config.epsilon_margin = 0.06;
    config.grid_size = 51;
    const CurvePair fit = fit_curves(data, config);
    bool any_missing = false, any_present = false;
    for (std::size_t g = 0; g < fit.mu.grid.size(); ++g) {
        if (std::isnan(fit.mu.values[g])) {
            any_missing = true;
            CHECK(fit.mu.n_effective[g] >= 0);
        } else {
            any_present = true;
        }
    }
    CHECK(any_missing);
    CHECK(any_present);
}

TEST_CASE("fit_curves with no mass anywhere fails") {
    Dataset data;
    Subject subj;
    subj.id = "s";
    subj.x = {0.01, 0.99};
    subj.y = {1.0, 2.0};
    data.subjects.push_back(subj);
    FitConfig config;
    config.bandwidth_mu = 0.05;
    config.bandwidth_s = 0.05;
    config.kernel = kEpan;
    config.epsilon_margin = 0.3;
    config.grid_size = 5;
    CHECK_THROWS_AS(fit_curves(data, config), DegenerateFitError);
}

TEST_CASE("invalid bandwidths and grids rejected") {
    const Dataset data = constant_dataset(1.0);
    FitConfig config;
    config.kernel = kEpan;
    config.bandwidth_mu = 0.0;
    config.bandwidth_s = 0.1;
    CHECK_THROWS_AS(fit_curves(data, config), ConfigError);
    config.bandwidth_mu = 0.6;
    CHECK_THROWS_AS(fit_curves(data, config), ConfigError);
    config.bandwidth_mu = 0.1;
    config.grid = {0.01};  // outside the epsilon-interior
    CHECK_THROWS_AS(fit_curves(data, config), ConfigError);
}

TEST_CASE("interpolation outside the hull raises") {
    CurveEstimate curve;
    curve.grid = {0.2, 0.5, 0.8};
    curve.values = {1.0, 2.0, 3.0};
    CHECK(curve.interpolate(0.35) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(curve.interpolate(0.2) == 1.0);
    CHECK(curve.interpolate(0.8) == 3.0);
    CHECK_THROWS_AS(curve.interpolate(0.1), ExtrapolationError);
    CHECK_THROWS_AS(curve.interpolate(0.9), ExtrapolationError);
}

TEST_CASE("no kernel mass raises NoMass") {
    Dataset data;
    Subject subj;
    subj.id = "s";
    subj.x = {0.9};
    subj.y = {1.0};
    data.subjects.push_back(subj);
    data.a = 0.0;
    data.b = 1.0;
    CHECK_THROWS_AS(fit_mu_raw(data, 0.1, 0.05, kEpan), NoMassError);
}
