#pragma once

#include <cstdint>
#include <vector>

#include "ladreg/dataset.hpp"
#include "ladreg/kernel.hpp"

namespace ladreg {

enum class EstimatorKind { MuRaw, MuJackknife, SRaw, SJackknife, SAlternative };

struct FitConfig {
    double bandwidth_mu = 0.1;  // b_n
    double bandwidth_s = 0.1;   // h_n
    KernelSpec kernel;
    std::vector<double> grid;      // empty: equispaced default on the epsilon-interior
    int grid_size = 101;
    double epsilon_margin = -1.0;  // < 0: sqrt(2) * max(b_n, h_n)
    bool clamp_negative_scale = false;
    int threads = 0;
};

struct CurveEstimate {
    std::vector<double> grid;
    std::vector<double> values;  // NaN where the grid point had no kernel mass
    EstimatorKind estimator = EstimatorKind::MuJackknife;
    double bandwidth = 0.0;      // primary bandwidth of this curve
    std::vector<int> n_effective;
    int negative_values = 0;     // jackknife scale estimates below zero (pre-clamp)

    double interpolate(double x) const;  // piecewise linear; ExtrapolationError outside hull
};

struct CurvePair {
    CurveEstimate mu;
    CurveEstimate s;
};

// Local LAD fits; single-point entry points mirror the estimator definitions,
// fit_curves orchestrates a whole grid.  All throw NoMassError when no design
// point carries kernel weight.
double fit_mu_raw(const PooledView& view, double x, double bandwidth, const KernelSpec& kernel);
double fit_mu_jackknife(const PooledView& view, double x, double bandwidth,
                        const KernelSpec& kernel);
double fit_s_raw(const PooledView& view, double x, double bandwidth_s, double mu_tilde_at_x,
                 const KernelSpec& kernel);
double fit_s_jackknife(const PooledView& view, double x, double bandwidth_s,
                       double mu_tilde_at_x, const KernelSpec& kernel);
double fit_s_alternative(const PooledView& view, double x, double bandwidth_s,
                         const CurveEstimate& mu_tilde_curve, const KernelSpec& kernel);

double fit_mu_raw(const Dataset& data, double x, double bandwidth, const KernelSpec& kernel);
double fit_mu_jackknife(const Dataset& data, double x, double bandwidth,
                        const KernelSpec& kernel);
double fit_s_raw(const Dataset& data, double x, double bandwidth_s, double mu_tilde_at_x,
                 const KernelSpec& kernel);
double fit_s_jackknife(const Dataset& data, double x, double bandwidth_s, double mu_tilde_at_x,
                       const KernelSpec& kernel);
double fit_s_alternative(const Dataset& data, double x, double bandwidth_s,
                         const CurveEstimate& mu_tilde_curve, const KernelSpec& kernel);

// Jackknife location and scale curves over the grid; grid points without mass
// are marked missing, and DegenerateFitError is raised only if every point is.
CurvePair fit_curves(const Dataset& data, const FitConfig& config);

// Number of observations with nonzero kernel weight at x.
int effective_points(const PooledView& view, double x, double bandwidth,
                     const KernelSpec& kernel);

// Nadaraya-Watson local average, the least-squares counterpart used by the
// robustness comparison.
double nadaraya_watson(const PooledView& view, double x, double bandwidth,
                       const KernelSpec& kernel);

std::vector<double> make_grid(double lo, double hi, int size);
double default_epsilon(const FitConfig& config);

}  // namespace ladreg
