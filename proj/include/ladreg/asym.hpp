#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ladreg/curves.hpp"
#include "ladreg/dataset.hpp"
#include "ladreg/design.hpp"
#include "ladreg/error_model.hpp"
#include "ladreg/kernel.hpp"

namespace ladreg {

// Everything the closed-form asymptotics need: curves, kernel constants and
// the error-density functionals kappa+ = f_e(-1)+f_e(1),
// kappa = [f_e(1)-f_e(-1)]/kappa+.
struct TheoryContext {
    TrueCurves curves;
    double domain_length = 1.0;
    KernelSpec kernel;
    double kappa_plus = 0.0;
    double kappa = 0.0;
    double F_e_minus1 = 0.0;
};

TheoryContext make_theory_context(const TrueCurves& curves, double domain_length,
                                  const KernelSpec& kernel);

// Bias curvature of the location fit:
// rho_mu = mu'' - [mu' f_e'(0)/f_e(0) + 2 s'] mu'/s.
double rho_mu(const TheoryContext& ctx, double x);

// Bias curvature of the scale fit:
// rho_s = s'' - 2s'^2/s + kappa [mu'' - 2 mu' s'/s]
//         - { f_e'(1)(s'+mu')^2 - f_e'(-1)(s'-mu')^2 } / (kappa+ s).
double rho_s(const TheoryContext& ctx, double x);

// phi (b-a) s(x)^2 / (4 f_e(0)^2), phi = phi_K or phi_Kstar (jackknife).
double asymptotic_variance_mu(const TheoryContext& ctx, double x, bool jackknife);

// sigma_c^2 of the scale CLT at bandwidth ratio c = h_n/b_n; pass
// c = infinity for the (N_n b_n)-scaled regime.  Collapses to
// phi_K (b-a) s^2 / (4 kappa+^2) when kappa = 0.
double asymptotic_variance_s(const TheoryContext& ctx, double x, double c_ratio);

// MSE-optimal bandwidth
// [phi_K (b-a) s^2 / (4 psi_K^2 rho_mu^2 f_e(0)^2)]^{1/5} N^{-1/5};
// DegenerateBiasError when rho_mu(x) = 0.
double optimal_bandwidth(const TheoryContext& ctx, double x, double n_total);

struct McReport {
    int replications = 0;
    std::vector<double> per_rep_estimates;
    double empirical_bias = 0.0;       // mean(estimate - truth), raw scale
    double empirical_variance = 0.0;   // of the normalized statistic
    double theoretical_variance = 0.0;
    double variance_ratio = 0.0;
    double ci_coverage = 0.0;
    std::vector<double> sup_errors;
    double ad_statistic = 0.0;         // Anderson-Darling score, reported not gated
    int failures = 0;
    double bandwidth = 0.0;
    double target = 0.0;
};

enum class MuEstimator { Raw, Jackknife };

struct CltMuOptions {
    MuEstimator estimator = MuEstimator::Raw;
    double fixed_bandwidth = 0.0;  // 0: the MSE-optimal rule
    int replications = 500;
    int threads = 0;
    KernelSpec kernel;  // phi_k == 0 means "construct the default family"
};

// Full-pipeline check of the location CLT: per replication synthesizes the
// dataset, fits at x, and accumulates the normalized statistic
// sqrt(N b) [est - mu(x) - bias].  Fit failures are counted and tolerated
// below 1% of replications.
McReport verify_clt_mu(const DesignSpec& design, const TrueCurves& curves,
                       const ErrorModel& model, double x, const CltMuOptions& options,
                       std::uint64_t seed);

// Same for the raw scale fit with the jackknife location plug-in; the
// normalized statistic is sqrt(N h) [s_hat - s(x) - psi_K rho_s h^2].
McReport verify_clt_s(const DesignSpec& design, const TrueCurves& curves,
                      const ErrorModel& model, double x, double bandwidth_mu,
                      double bandwidth_s, int replications, int threads, std::uint64_t seed);

struct BahadurRow {
    double n_total = 0.0;
    double bandwidth = 0.0;
    double median_abs_remainder = 0.0;
    double median_abs_leading = 0.0;
    double remainder_ratio = 0.0;      // median|remainder| / median|leading|
    double q_mean_in_se = 0.0;         // MC mean of Q in units of its standard error
    double leading_variance_ratio = 0.0;  // MC variance of leading term / prediction
};

// Decomposes est - mu(x) into bias + leading linear term + remainder per
// replication; Q is evaluated exactly from the simulated data with the
// centering from the known error law.
std::vector<BahadurRow> verify_bahadur_remainder(std::span<const DesignSpec> designs,
                                                 const TrueCurves& curves,
                                                 const ErrorModel& model, double x,
                                                 int replications, int threads,
                                                 std::uint64_t seed);

// Anderson-Darling statistic of a sample against the standard normal.
double anderson_darling(std::vector<double> standardized);

}  // namespace ladreg
