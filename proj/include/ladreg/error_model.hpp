#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ladreg {

// Innovation law of the i.i.d. inputs driving an error process.
struct Innovation {
    enum class Kind { StdNormal, StudentT, ContaminatedNormal };
    Kind kind = Kind::StdNormal;
    int df = 4;           // StudentT
    double eps = 0.1;     // ContaminatedNormal: contamination probability
    double scale = 3.0;   // ContaminatedNormal: contaminated sd

    double l2_norm() const;
};

Innovation std_normal_innovation();
Innovation student_t_innovation(int df);
Innovation contaminated_normal_innovation(double eps, double scale);

// Stationary two-sided error process e_j = G(eps_j, eps_{j+-1}, ...) plus the
// affine standardizer that enforces median(e) = 0 and median(|e|) = 1.
struct ErrorModel {
    enum class Kind {
        IID,
        MDependent,        // e_j = sum_{|r|<=m} mixer[r+m] eps_{j-r}
        NoncausalLinear,   // e_j = sum_{|r|<=L} rho^|r| eps_{j-r}
        ThresholdAR,       // e_j = a max(e_{j-1},0) + b min(e_{j-1},0) + eps_j
        Arch,              // e_j = eps_j (a^2 + b^2 e_{j-1}^2)^{1/2}
        RandomCoefficient, // e_j = (a + b eps_j) e_{j-1} + eps_j
        ExpAr              // e_j = [a + b exp(-c e_{j-1}^2)] e_{j-1} + eps_j
    };

    struct Standardizer {
        double shift = 0.0;
        double divisor = 1.0;
    };

    Kind kind = Kind::IID;
    int m = 0;                  // MDependent
    std::vector<double> mixer;  // MDependent, length 2m+1
    double rho = 0.5;           // NoncausalLinear
    int truncation_lag = 0;     // NoncausalLinear; 0 = auto (rho^L < 1e-12)
    double a = 0.0, b = 0.0, c = 1.0;  // recursive families
    Innovation innovation{};
    Standardizer standardizer{};

    bool is_linear() const;            // IID / MDependent / NoncausalLinear
    int dependence_lag() const;        // exact for linear kinds: m or L
    std::vector<double> linear_coefficients() const;  // lags -L..L
    std::string fingerprint() const;
};

// Factories validate the contraction conditions and calibrate the
// standardizer (closed form where available, otherwise a cached 1e6-sample
// pre-run with a fixed calibration seed).
ErrorModel make_iid(Innovation innov = std_normal_innovation());
ErrorModel make_mdependent(int m, std::vector<double> mixer = {},
                           Innovation innov = std_normal_innovation());
ErrorModel make_noncausal_linear(double rho, int truncation_lag = 0,
                                 Innovation innov = std_normal_innovation());
ErrorModel make_threshold_ar(double a, double b, Innovation innov = std_normal_innovation());
ErrorModel make_arch(double a, double b, Innovation innov = std_normal_innovation());
ErrorModel make_random_coefficient(double a, double b,
                                   Innovation innov = std_normal_innovation());
ErrorModel make_exp_ar(double a, double b, double c,
                       Innovation innov = std_normal_innovation());

// Symmetric m=2 mixer whose median-indicator autocovariances at lags 1..4
// cancel in sum, so pooled kernel windows see no cross-term variance
// contribution.  Used by the CLT verification harness.
std::vector<double> balanced_m2_mixer();

// One stationary path; raw variant skips the standardizer.  Recursive kinds
// discard max(burn_in, 1000) warmup steps starting from state 0.
std::vector<double> simulate_errors(const ErrorModel& model, std::size_t length,
                                    std::size_t burn_in, std::uint64_t seed);
std::vector<double> simulate_errors_raw(const ErrorModel& model, std::size_t length,
                                        std::size_t burn_in, std::uint64_t seed);

struct CoupledPaths {
    std::vector<double> original;
    std::vector<double> coupled;
};

// Coupled path per e_j(k): innovations within lag k of each target index are
// shared with the original path, everything beyond is replaced by fresh
// i.i.d. copies drawn per target index, so coupled[j1] and coupled[j2] are
// independent whenever |j1-j2| >= 2k+1.  Exact for the linear kinds; for the
// recursive kinds the coupled value restarts the recursion max(5k, 64) steps
// earlier, which is accurate up to the geometric contraction residual.
CoupledPaths simulate_coupled_errors(const ErrorModel& model, std::size_t length,
                                     int coupling_lag, std::uint64_t seed);

struct DecayPoint {
    int lag;
    double lq_distance;
};

// Monte Carlo ||h(e_0) - h(e_0(k))||_q along one stationary coupled path per
// lag.  Default transform is the identity.
std::vector<DecayPoint> coupling_decay_curve(const ErrorModel& model, double q,
                                             std::span<const int> lags, std::size_t mc_size,
                                             std::uint64_t seed,
                                             const std::function<double(double)>& transform = {});

// Slope of a least-squares line through (lag, log distance); zero distances
// are skipped.
double log_decay_slope(std::span<const DecayPoint> curve);

// Density/distribution functionals of the standardized error law used by the
// bias and variance formulas.
struct ErrorLawInfo {
    double f0 = 0.0;        // f_e(0)
    double fprime0 = 0.0;   // f_e'(0)
    double f1 = 0.0;        // f_e(1)
    double fm1 = 0.0;       // f_e(-1)
    double fprime1 = 0.0;   // f_e'(1)
    double fprime_m1 = 0.0; // f_e'(-1)
    double F_m1 = 0.0;      // F_e(-1)
};

// Closed form for scaled normal / Student-t / contaminated-normal marginals;
// otherwise a cached kernel-density fit to a 1e6-sample pre-run.
ErrorLawInfo error_law_info(const ErrorModel& model);

// Standardized marginal CDF F_e; empirical CDF for simulated marginals.
double error_cdf(const ErrorModel& model, double x);

ErrorModel::Standardizer calibrate_standardizer(const ErrorModel& model);

}  // namespace ladreg
