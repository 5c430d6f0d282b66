#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ladreg/diagnostics.hpp"
#include "ladreg/errors.hpp"

using namespace ladreg;

namespace {

EmpiricalProcessFrame small_frame(const ErrorModel& model, int coupling_lag,
                                  std::uint64_t seed, int n_subjects = 6, int m = 50) {
    return make_frame(uniform_design(n_subjects, m), default_test_curves(model), model, 0.15,
                      make_kernel(KernelFamily::Epanechnikov), coupling_lag, seed);
}

}  // namespace

TEST_CASE("eval_F boundary values") {
    const ErrorModel model = make_iid();
    const EmpiricalProcessFrame frame = small_frame(model, 1, 3);

    double y_min = 1e300, y_max = -1e300, mass = 0.0;
    const double x = 0.5;
    for (const auto& subj : frame.data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j) {
            y_min = std::min(y_min, subj.y[j]);
            y_max = std::max(y_max, subj.y[j]);
            mass += eval_kernel(frame.kernel, (subj.x[j] - x) / frame.bandwidth);
        }

    CHECK(eval_F(frame, x, y_min - 1.0, false) == 0.0);
    CHECK(eval_F(frame, x, y_max, false) == doctest::Approx(mass).epsilon(1e-12));
    CHECK(eval_F(frame, x, y_max + 5.0, false) == doctest::Approx(mass).epsilon(1e-12));
}

TEST_CASE("eval_F single observation") {
    EmpiricalProcessFrame frame;
    frame.kernel = make_kernel(KernelFamily::Epanechnikov);
    frame.bandwidth = 0.2;
    frame.data.subjects.push_back({"s", {0.52}, {1.7}});
    frame.coupled = frame.data;
    const double w = eval_kernel(frame.kernel, (0.52 - 0.5) / 0.2);
    CHECK(eval_F(frame, 0.5, 1.7, false) == w);
    CHECK(eval_F(frame, 0.5, 1.69, false) == 0.0);
}

TEST_CASE("eval_F monotone and bounded in y") {
    const ErrorModel model = make_noncausal_linear(0.5);
    const EmpiricalProcessFrame frame = small_frame(model, 3, 5);
    const double x = 0.4;
    double mass = 0.0;
    for (const auto& subj : frame.data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j)
            mass += eval_kernel(frame.kernel, (subj.x[j] - x) / frame.bandwidth);
    double prev = -1.0;
    for (double y = -6.0; y <= 6.0; y += 0.25) {
        const double f = eval_F(frame, x, y, false);
        CHECK(f >= prev);
        CHECK(f >= 0.0);
        CHECK(f <= mass + 1e-12);
        prev = f;
    }
}

TEST_CASE("coupling discrepancy vanishes when coupling is exact") {
    // m-dependent with k >= m: the coupled process IS the original.
    const ErrorModel model = make_mdependent(2, balanced_m2_mixer());
    const EmpiricalProcessFrame frame = small_frame(model, 2, 7);
    const std::vector<double> x_grid{0.3, 0.5, 0.7};
    CHECK(sup_coupling_discrepancy(frame, x_grid) == 0.0);
}

TEST_CASE("identical datasets give zero discrepancy") {
    const ErrorModel model = make_iid();
    EmpiricalProcessFrame frame = small_frame(model, 0, 9);
    frame.coupled = frame.data;
    const std::vector<double> x_grid{0.25, 0.5, 0.75};
    CHECK(sup_coupling_discrepancy(frame, x_grid) == 0.0);
}

TEST_CASE("jump-point grid attains the sup") {
    const ErrorModel model = make_noncausal_linear(0.5);
    const EmpiricalProcessFrame frame = small_frame(model, 2, 11);
    const std::vector<double> x_grid{0.35, 0.5, 0.65};
    const double exact = sup_coupling_discrepancy(frame, x_grid);

    // Enlarging the y grid beyond the union of observed values cannot move
    // the sup: evaluate on the union plus midpoints and far tails.
    std::vector<double> y_grid;
    for (const auto& subj : frame.data.subjects) y_grid.insert(y_grid.end(), subj.y.begin(),
                                                               subj.y.end());
    for (const auto& subj : frame.coupled.subjects) y_grid.insert(y_grid.end(), subj.y.begin(),
                                                                  subj.y.end());
    std::sort(y_grid.begin(), y_grid.end());
    std::vector<double> enlarged = y_grid;
    for (std::size_t i = 0; i + 1 < y_grid.size(); ++i)
        enlarged.push_back(0.5 * (y_grid[i] + y_grid[i + 1]));
    enlarged.push_back(y_grid.front() - 3.0);
    enlarged.push_back(y_grid.back() + 3.0);
    std::sort(enlarged.begin(), enlarged.end());

    CHECK(sup_coupling_discrepancy(frame, x_grid, enlarged) ==
          doctest::Approx(exact).epsilon(1e-14));
    CHECK(sup_coupling_discrepancy(frame, x_grid, y_grid) ==
          doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("modulus with delta zero is exactly zero") {
    const ErrorModel model = make_iid();
    const EmpiricalProcessFrame frame = small_frame(model, 1, 13);
    const std::vector<double> x_grid{0.5};
    const ModulusResult result = modulus_of_continuity(frame, 0.0, x_grid, {}, 30);
    CHECK(result.sup_abs == 0.0);
}

TEST_CASE("modulus beyond the data range cancels to centering noise") {
    const ErrorModel model = make_iid();
    const EmpiricalProcessFrame frame = small_frame(model, 1, 17);
    double y_max = -1e300;
    for (const auto& subj : frame.data.subjects)
        y_max = std::max(y_max, *std::max_element(subj.y.begin(), subj.y.end()));

    const std::vector<double> x_grid{0.5};
    const std::vector<double> y_far{y_max + 10.0};
    const ModulusResult result = modulus_of_continuity(frame, 0.5, x_grid, y_far, 50);
    // Both observed terms saturate at the total mass; whatever is left is
    // the centering tail noise.
    CHECK(result.sup_abs < 0.2);
}

TEST_CASE("centered oscillation averages to zero over replications") {
    // Signed D_n at a fixed (x, y, delta), centered with an independent batch
    // of replications; the mean over fresh frames must sit at zero within MC
    // error.
    const ErrorModel model = make_iid();
    const double x = 0.5, y = 0.0, delta = 0.4;

    const int n_center = 40, n_eval = 40;
    double center_lo = 0.0, center_hi = 0.0;
    for (int r = 0; r < n_center; ++r) {
        const EmpiricalProcessFrame frame = small_frame(model, 0, 1000 + r, 4, 40);
        center_lo += eval_F(frame, x, y, false);
        center_hi += eval_F(frame, x, y + delta, false);
    }
    center_lo /= n_center;
    center_hi /= n_center;

    std::vector<double> dn(n_eval);
    for (int r = 0; r < n_eval; ++r) {
        const EmpiricalProcessFrame frame = small_frame(model, 0, 5000 + r, 4, 40);
        dn[r] = (eval_F(frame, x, y + delta, false) - center_hi) -
                (eval_F(frame, x, y, false) - center_lo);
    }
    double mean = 0.0;
    for (double v : dn) mean += v;
    mean /= n_eval;
    double var = 0.0;
    for (double v : dn) var += (v - mean) * (v - mean);
    var /= (n_eval - 1);
    // Both the evaluation mean and the centering estimate carry MC error.
    const double tol = 3.0 * std::sqrt(var / n_eval + var / n_center);
    CHECK(std::abs(mean) <= tol);
}

TEST_CASE("phi_n is the exact weighted sum of squares") {
    const ErrorModel model = make_iid();
    const EmpiricalProcessFrame frame = small_frame(model, 1, 19);
    const std::vector<double> x_grid{0.4, 0.6};
    double expect = 0.0;
    for (double x : x_grid) {
        double acc = 0.0;
        for (const auto& subj : frame.data.subjects)
            for (std::size_t j = 0; j < subj.x.size(); ++j) {
                const double w = eval_kernel(frame.kernel, (subj.x[j] - x) / frame.bandwidth);
                acc += w * w;
            }
        expect = std::max(expect, acc);
    }
    CHECK(weight_sum_sq_sup(frame, x_grid) == expect);
    const ModulusResult m = modulus_of_continuity(frame, 0.1, x_grid, {}, 20);
    CHECK(m.phi_n == expect);
}

TEST_CASE("default coupling lag grows with log N") {
    CHECK(default_coupling_lag(500) == static_cast<int>(std::floor(2.0 * std::log(500.0))));
    CHECK(default_coupling_lag(8000) == static_cast<int>(std::floor(2.0 * std::log(8000.0))));
    CHECK(default_coupling_lag(2) >= 1);
}

TEST_CASE("frame construction validates the lag") {
    const ErrorModel model = make_iid();
    CHECK_THROWS_AS(make_frame(uniform_design(2, 10), default_test_curves(model), model, 0.1,
                               make_kernel(KernelFamily::Epanechnikov), -1, 1),
                    ConfigError);
}
