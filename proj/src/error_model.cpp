#include "ladreg/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ladreg/errors.hpp"
#include "ladreg/rng.hpp"

namespace ladreg {

namespace {

constexpr std::uint64_t kCalibrationSeed = 0x5EEDCA11BULL;
constexpr std::size_t kCalibrationSamples = 1000000;

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

double innovation_draw(const Innovation& innov, rng::Engine& eng) {
    switch (innov.kind) {
        case Innovation::Kind::StdNormal:
            return eng.normal();
        case Innovation::Kind::StudentT: {
            const double z = eng.normal();
            double chi = 0.0;
            for (int i = 0; i < innov.df; ++i) {
                const double w = eng.normal();
                chi += w * w;
            }
            return z / std::sqrt(chi / static_cast<double>(innov.df));
        }
        case Innovation::Kind::ContaminatedNormal: {
            const double u = eng.uniform();
            const double z = eng.normal();
            return (u < innov.eps) ? innov.scale * z : z;
        }
    }
    return 0.0;
}

// Counter-addressed draw with the same law as innovation_draw; used for the
// per-target-index fresh copies in the coupling construction.
double innovation_draw_at(const Innovation& innov, std::uint64_t key, std::uint64_t counter) {
    const std::uint64_t sub = rng::derive(key, counter);
    switch (innov.kind) {
        case Innovation::Kind::StdNormal:
            return rng::normal_at(sub, 0);
        case Innovation::Kind::StudentT: {
            const double z = rng::normal_at(sub, 0);
            double chi = 0.0;
            for (int i = 1; i <= innov.df; ++i) {
                const double w = rng::normal_at(sub, static_cast<std::uint64_t>(i));
                chi += w * w;
            }
            return z / std::sqrt(chi / static_cast<double>(innov.df));
        }
        case Innovation::Kind::ContaminatedNormal: {
            const double u = rng::uniform_at(sub, 0);
            const double z = rng::normal_at(sub, 1);
            return (u < innov.eps) ? innov.scale * z : z;
        }
    }
    return 0.0;
}

void validate_innovation(const Innovation& innov) {
    if (innov.kind == Innovation::Kind::StudentT && innov.df < 3)
        throw ConfigError("student-t innovations need df >= 3");
    if (innov.kind == Innovation::Kind::ContaminatedNormal &&
        (innov.eps < 0.0 || innov.eps >= 1.0 || innov.scale <= 0.0))
        throw ConfigError("contaminated normal needs eps in [0,1) and scale > 0");
}

double recursion_step(const ErrorModel& model, double prev, double eps) {
    switch (model.kind) {
        case ErrorModel::Kind::ThresholdAR:
            return model.a * std::max(prev, 0.0) + model.b * std::min(prev, 0.0) + eps;
        case ErrorModel::Kind::Arch:
            return eps * std::sqrt(model.a * model.a + model.b * model.b * prev * prev);
        case ErrorModel::Kind::RandomCoefficient:
            return (model.a + model.b * eps) * prev + eps;
        case ErrorModel::Kind::ExpAr:
            return (model.a + model.b * std::exp(-model.c * prev * prev)) * prev + eps;
        default:
            throw ConfigError("recursion_step: not a recursive model");
    }
}

double sorted_median(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void standardize_inplace(std::vector<double>& v, const ErrorModel::Standardizer& s) {
    for (double& x : v) x = (x - s.shift) / s.divisor;
}

enum class MarginalKind { ScaledNormal, ScaledStudentT, ScaledContaminated, Simulated };

MarginalKind marginal_kind(const ErrorModel& model) {
    if (model.is_linear() && model.innovation.kind == Innovation::Kind::StdNormal)
        return MarginalKind::ScaledNormal;
    if (model.kind == ErrorModel::Kind::IID) {
        if (model.innovation.kind == Innovation::Kind::StudentT)
            return MarginalKind::ScaledStudentT;
        if (model.innovation.kind == Innovation::Kind::ContaminatedNormal)
            return MarginalKind::ScaledContaminated;
    }
    return MarginalKind::Simulated;
}

// Contaminated-normal mixture with standard components.
double mix_pdf(const Innovation& innov, double x) {
    return (1.0 - innov.eps) * boost::math::pdf(kStdNormal, x) +
           innov.eps / innov.scale * boost::math::pdf(kStdNormal, x / innov.scale);
}

double mix_cdf(const Innovation& innov, double x) {
    return (1.0 - innov.eps) * boost::math::cdf(kStdNormal, x) +
           innov.eps * boost::math::cdf(kStdNormal, x / innov.scale);
}

double mix_pdf_deriv(const Innovation& innov, double x) {
    const auto dphi = [](double t) { return -t * boost::math::pdf(kStdNormal, t); };
    return (1.0 - innov.eps) * dphi(x) +
           innov.eps / (innov.scale * innov.scale) * dphi(x / innov.scale);
}

double mix_quantile75(const Innovation& innov) {
    double lo = 0.0, hi = 10.0 * innov.scale;
    while (mix_cdf(innov, hi) < 0.75) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mix_cdf(innov, mid) < 0.75 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct Artifact {
    ErrorModel::Standardizer standardizer;
    std::vector<double> sorted_sample;  // standardized
    bool law_ready = false;
    ErrorLawInfo law;
};

std::mutex g_artifact_mutex;
std::map<std::string, std::shared_ptr<Artifact>>& artifact_cache() {
    static std::map<std::string, std::shared_ptr<Artifact>> cache;
    return cache;
}

std::shared_ptr<Artifact> calibration_artifact(const ErrorModel& model) {
    const std::string key = model.fingerprint();
    {
        std::lock_guard<std::mutex> lock(g_artifact_mutex);
        auto it = artifact_cache().find(key);
        if (it != artifact_cache().end()) return it->second;
    }
    auto art = std::make_shared<Artifact>();
    std::vector<double> sample =
        simulate_errors_raw(model, kCalibrationSamples, 1000, kCalibrationSeed);
    std::vector<double> tmp = sample;
    art->standardizer.shift = sorted_median(tmp);
    for (double& x : tmp) x = std::abs(x - art->standardizer.shift);
    art->standardizer.divisor = sorted_median(tmp);
    if (!(art->standardizer.divisor > 0.0))
        throw ConfigError("standardizer calibration produced a degenerate scale");
    standardize_inplace(sample, art->standardizer);
    std::sort(sample.begin(), sample.end());
    art->sorted_sample = std::move(sample);

    std::lock_guard<std::mutex> lock(g_artifact_mutex);
    auto [it, inserted] = artifact_cache().emplace(key, art);
    return it->second;
}

// Gaussian KDE density and derivative evaluated from the sorted sample.
struct KdeFit {
    const std::vector<double>& xs;
    double h;

    double density(double u) const {
        const auto lo = std::lower_bound(xs.begin(), xs.end(), u - 8.0 * h);
        const auto hi = std::upper_bound(xs.begin(), xs.end(), u + 8.0 * h);
        double acc = 0.0;
        for (auto it = lo; it != hi; ++it)
            acc += boost::math::pdf(kStdNormal, (u - *it) / h);
        return acc / (static_cast<double>(xs.size()) * h);
    }

    double density_deriv(double u) const {
        const auto lo = std::lower_bound(xs.begin(), xs.end(), u - 8.0 * h);
        const auto hi = std::upper_bound(xs.begin(), xs.end(), u + 8.0 * h);
        double acc = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double t = (u - *it) / h;
            acc += -t * boost::math::pdf(kStdNormal, t);
        }
        return acc / (static_cast<double>(xs.size()) * h * h);
    }
};

ErrorLawInfo law_from_sample(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    const double iqr = xs[(3 * n) / 4] - xs[n / 4];
    const double spread = std::min(std::sqrt(var), iqr / 1.34);
    const double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);

    const KdeFit kde{xs, h};
    ErrorLawInfo law;
    law.f0 = kde.density(0.0);
    law.fprime0 = kde.density_deriv(0.0);
    law.f1 = kde.density(1.0);
    law.fm1 = kde.density(-1.0);
    law.fprime1 = kde.density_deriv(1.0);
    law.fprime_m1 = kde.density_deriv(-1.0);
    law.F_m1 = static_cast<double>(std::lower_bound(xs.begin(), xs.end(), -1.0) - xs.begin()) /
               static_cast<double>(n);
    return law;
}

}  // namespace

double Innovation::l2_norm() const {
    switch (kind) {
        case Kind::StdNormal:
            return 1.0;
        case Kind::StudentT:
            return std::sqrt(static_cast<double>(df) / static_cast<double>(df - 2));
        case Kind::ContaminatedNormal:
            return std::sqrt(1.0 - eps + eps * scale * scale);
    }
    return 1.0;
}

Innovation std_normal_innovation() { return Innovation{}; }

Innovation student_t_innovation(int df) {
    Innovation innov;
    innov.kind = Innovation::Kind::StudentT;
    innov.df = df;
    return innov;
}

Innovation contaminated_normal_innovation(double eps, double scale) {
    Innovation innov;
    innov.kind = Innovation::Kind::ContaminatedNormal;
    innov.eps = eps;
    innov.scale = scale;
    return innov;
}

bool ErrorModel::is_linear() const {
    return kind == Kind::IID || kind == Kind::MDependent || kind == Kind::NoncausalLinear;
}

int ErrorModel::dependence_lag() const {
    switch (kind) {
        case Kind::IID:
            return 0;
        case Kind::MDependent:
            return m;
        case Kind::NoncausalLinear: {
            if (truncation_lag > 0) return truncation_lag;
            return static_cast<int>(std::ceil(std::log(1e-12) / std::log(rho)));
        }
        default:
            return -1;
    }
}

std::vector<double> ErrorModel::linear_coefficients() const {
    switch (kind) {
        case Kind::IID:
            return {1.0};
        case Kind::MDependent:
            return mixer;
        case Kind::NoncausalLinear: {
            const int lag = dependence_lag();
            std::vector<double> coefs(2 * static_cast<std::size_t>(lag) + 1);
            for (int r = -lag; r <= lag; ++r)
                coefs[static_cast<std::size_t>(r + lag)] = std::pow(rho, std::abs(r));
            return coefs;
        }
        default:
            throw ConfigError("linear_coefficients: model is not linear");
    }
}

std::string ErrorModel::fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << static_cast<int>(kind) << '|' << m << '|';
    for (double c : mixer) os << c << ',';
    os << '|' << rho << '|' << truncation_lag << '|' << a << '|' << b << '|' << c << '|'
       << static_cast<int>(innovation.kind) << '|' << innovation.df << '|' << innovation.eps
       << '|' << innovation.scale;
    return os.str();
}

// Solves sum_{g=1..4} arcsin(r_g) = 0 for the symmetric family
// (a, b, 1, b, a) at a = 0.4; r_g are the process autocorrelations.
std::vector<double> balanced_m2_mixer() { return {0.4, -0.2944, 1.0, -0.2944, 0.4}; }

ErrorModel make_iid(Innovation innov) {
    validate_innovation(innov);
    ErrorModel model;
    model.kind = ErrorModel::Kind::IID;
    model.innovation = innov;
    model.standardizer = calibrate_standardizer(model);
    return model;
}

ErrorModel make_mdependent(int m, std::vector<double> mixer, Innovation innov) {
    validate_innovation(innov);
    if (m < 0) throw ConfigError("m-dependent model needs m >= 0");
    if (mixer.empty()) mixer.assign(2 * static_cast<std::size_t>(m) + 1, 1.0);
    if (mixer.size() != 2 * static_cast<std::size_t>(m) + 1)
        throw ConfigError("m-dependent mixer must have 2m+1 coefficients");
    double norm = 0.0;
    for (double c : mixer) {
        if (!std::isfinite(c)) throw ConfigError("m-dependent mixer has a non-finite entry");
        norm += c * c;
    }
    if (!(norm > 0.0)) throw ConfigError("m-dependent mixer is all zero");
    ErrorModel model;
    model.kind = ErrorModel::Kind::MDependent;
    model.m = m;
    model.mixer = std::move(mixer);
    model.innovation = innov;
    model.standardizer = calibrate_standardizer(model);
    return model;
}

ErrorModel make_noncausal_linear(double rho, int truncation_lag, Innovation innov) {
    validate_innovation(innov);
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("noncausal linear model needs rho in (0,1)");
    if (truncation_lag < 0) throw ConfigError("truncation lag must be >= 0 (0 = auto)");
    ErrorModel model;
    model.kind = ErrorModel::Kind::NoncausalLinear;
    model.rho = rho;
    model.truncation_lag = truncation_lag;
    model.innovation = innov;
    model.standardizer = calibrate_standardizer(model);
    return model;
}

ErrorModel make_threshold_ar(double a, double b, Innovation innov) {
    validate_innovation(innov);
    if (std::max(std::abs(a), std::abs(b)) >= 1.0)
        throw ConfigError("threshold AR needs max(|a|,|b|) < 1");
    ErrorModel model;
    model.kind = ErrorModel::Kind::ThresholdAR;
    model.a = a;
    model.b = b;
    model.innovation = innov;
    model.standardizer = calibrate_standardizer(model);
    return model;
}

ErrorModel make_arch(double a, double b, Innovation innov) {
    validate_innovation(innov);
    if (std::abs(b) * innov.l2_norm() >= 1.0)
        throw ConfigError("ARCH needs |b| * ||eps||_2 < 1");
    ErrorModel model;
    model.kind = ErrorModel::Kind::Arch;
    model.a = a;
    model.b = b;
    model.innovation = innov;
    model.standardizer = calibrate_standardizer(model);
    return model;
}

ErrorModel make_random_coefficient(double a, double b, Innovation innov) {
    validate_innovation(innov);
    const double s = innov.l2_norm();
    if (std::sqrt(a * a + b * b * s * s) >= 1.0)
        throw ConfigError("random coefficient model needs ||a + b*eps||_2 < 1");
    ErrorModel model;
    model.kind = ErrorModel::Kind::RandomCoefficient;
    model.a = a;
    model.b = b;
    model.innovation = innov;
    model.standardizer = calibrate_standardizer(model);
    return model;
}

ErrorModel make_exp_ar(double a, double b, double c, Innovation innov) {
    validate_innovation(innov);
    if (std::abs(a) + std::abs(b) >= 1.0 || c < 0.0)
        throw ConfigError("exponential AR needs |a| + |b| < 1 and c >= 0");
    ErrorModel model;
    model.kind = ErrorModel::Kind::ExpAr;
    model.a = a;
    model.b = b;
    model.c = c;
    model.innovation = innov;
    model.standardizer = calibrate_standardizer(model);
    return model;
}

std::vector<double> simulate_errors_raw(const ErrorModel& model, std::size_t length,
                                        std::size_t burn_in, std::uint64_t seed) {
    if (length < 1) throw ConfigError("simulate_errors: length must be >= 1");
    rng::Engine eng(rng::derive(seed, 0xE5501u));
    std::vector<double> out(length);

    if (model.is_linear()) {
        const std::vector<double> coefs = model.linear_coefficients();
        const int lag = model.dependence_lag();
        const std::size_t n_eps = length + 2 * static_cast<std::size_t>(lag);
        std::vector<double> eps(n_eps);
        for (double& e : eps) e = innovation_draw(model.innovation, eng);
        // eps[t + lag] holds innovation at time t, t in [-lag, length-1+lag].
        for (std::size_t j = 0; j < length; ++j) {
            double acc = 0.0;
            for (int r = -lag; r <= lag; ++r)
                acc += coefs[static_cast<std::size_t>(r + lag)] *
                       eps[j + static_cast<std::size_t>(lag - r)];
            out[j] = acc;
        }
        return out;
    }

    const std::size_t burn = std::max<std::size_t>(burn_in, 1000);
    double state = 0.0;
    for (std::size_t t = 0; t < burn; ++t)
        state = recursion_step(model, state, innovation_draw(model.innovation, eng));
    for (std::size_t j = 0; j < length; ++j) {
        state = recursion_step(model, state, innovation_draw(model.innovation, eng));
        out[j] = state;
    }
    return out;
}

std::vector<double> simulate_errors(const ErrorModel& model, std::size_t length,
                                    std::size_t burn_in, std::uint64_t seed) {
    std::vector<double> out = simulate_errors_raw(model, length, burn_in, seed);
    standardize_inplace(out, model.standardizer);
    return out;
}

CoupledPaths simulate_coupled_errors(const ErrorModel& model, std::size_t length,
                                     int coupling_lag, std::uint64_t seed) {
    if (coupling_lag < 0) throw ConfigError("coupling lag must be >= 0");
    if (length < 1) throw ConfigError("simulate_coupled_errors: length must be >= 1");

    CoupledPaths paths;
    paths.original.resize(length);
    paths.coupled.resize(length);
    rng::Engine eng(rng::derive(seed, 0xC0091u));
    const std::uint64_t fresh_root = rng::derive(seed, 0xF8E54u);

    if (model.is_linear()) {
        const std::vector<double> coefs = model.linear_coefficients();
        const int lag = model.dependence_lag();
        const int kk = std::min(coupling_lag, lag);
        std::vector<double> eps(length + 2 * static_cast<std::size_t>(lag));
        for (double& e : eps) e = innovation_draw(model.innovation, eng);
        for (std::size_t j = 0; j < length; ++j) {
            const std::uint64_t key_j = rng::derive(fresh_root, j);
            double orig = 0.0, cpl = 0.0;
            for (int r = -lag; r <= lag; ++r) {
                const double c = coefs[static_cast<std::size_t>(r + lag)];
                const double shared = eps[j + static_cast<std::size_t>(lag - r)];
                orig += c * shared;
                if (std::abs(r) <= kk) {
                    cpl += c * shared;
                } else {
                    // Fresh copy of the innovation at absolute position j - r,
                    // private to target index j.
                    cpl += c * innovation_draw_at(model.innovation, key_j,
                                                  static_cast<std::uint64_t>(lag - r));
                }
            }
            paths.original[j] = orig;
            paths.coupled[j] = cpl;
        }
    } else {
        // Causal recursions: the coupled value restarts the recursion well
        // before the shared window [j-k, j]; contraction makes the initial
        // state immaterial.
        const int restart = std::max(5 * coupling_lag, 64);
        const std::size_t burn = static_cast<std::size_t>(std::max(1000, restart + 1));
        std::vector<double> eps(length + burn);  // eps[t + burn] = innovation at time t
        for (double& e : eps) e = innovation_draw(model.innovation, eng);

        double state = 0.0;
        for (std::size_t idx = 0; idx < eps.size(); ++idx) {
            state = recursion_step(model, state, eps[idx]);
            const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(idx) -
                                     static_cast<std::ptrdiff_t>(burn);
            if (t >= 0) paths.original[static_cast<std::size_t>(t)] = state;
        }

        for (std::size_t j = 0; j < length; ++j) {
            const std::uint64_t key_j = rng::derive(fresh_root, j);
            double cpl = 0.0;
            std::uint64_t fresh_counter = 0;
            const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(j) - restart;
            for (std::ptrdiff_t t = start; t <= static_cast<std::ptrdiff_t>(j); ++t) {
                const bool shared =
                    t >= static_cast<std::ptrdiff_t>(j) - coupling_lag;
                const double e =
                    shared ? eps[static_cast<std::size_t>(t + static_cast<std::ptrdiff_t>(burn))]
                           : innovation_draw_at(model.innovation, key_j, fresh_counter++);
                cpl = recursion_step(model, cpl, e);
            }
            paths.coupled[j] = cpl;
        }
    }

    standardize_inplace(paths.original, model.standardizer);
    standardize_inplace(paths.coupled, model.standardizer);
    return paths;
}

std::vector<DecayPoint> coupling_decay_curve(const ErrorModel& model, double q,
                                             std::span<const int> lags, std::size_t mc_size,
                                             std::uint64_t seed,
                                             const std::function<double(double)>& transform) {
    if (!(q > 0.0)) throw ConfigError("coupling_decay_curve: q must be > 0");
    if (mc_size < 1000) throw ConfigError("coupling_decay_curve: mc_size must be >= 1000");
    std::vector<DecayPoint> curve;
    curve.reserve(lags.size());
    for (int k : lags) {
        const CoupledPaths p =
            simulate_coupled_errors(model, mc_size, k, rng::derive(seed, 0xDECA7u, k));
        double acc = 0.0;
        for (std::size_t j = 0; j < mc_size; ++j) {
            const double a = transform ? transform(p.original[j]) : p.original[j];
            const double b = transform ? transform(p.coupled[j]) : p.coupled[j];
            acc += std::pow(std::abs(a - b), q);
        }
        curve.push_back({k, std::pow(acc / static_cast<double>(mc_size), 1.0 / q)});
    }
    return curve;
}

double log_decay_slope(std::span<const DecayPoint> curve) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& p : curve) {
        if (p.lq_distance <= 0.0) continue;
        const double x = static_cast<double>(p.lag);
        const double y = std::log(p.lq_distance);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

ErrorModel::Standardizer calibrate_standardizer(const ErrorModel& model) {
    switch (marginal_kind(model)) {
        case MarginalKind::ScaledNormal: {
            const double c_phi = boost::math::quantile(kStdNormal, 0.75);
            double sumsq = 0.0;
            for (double c : model.linear_coefficients()) sumsq += c * c;
            return {0.0, c_phi * std::sqrt(sumsq)};
        }
        case MarginalKind::ScaledStudentT: {
            const boost::math::students_t_distribution<double> t(model.innovation.df);
            return {0.0, boost::math::quantile(t, 0.75)};
        }
        case MarginalKind::ScaledContaminated:
            return {0.0, mix_quantile75(model.innovation)};
        case MarginalKind::Simulated:
            return calibration_artifact(model)->standardizer;
    }
    return {};
}

ErrorLawInfo error_law_info(const ErrorModel& model) {
    switch (marginal_kind(model)) {
        case MarginalKind::ScaledNormal: {
            // e = Z / c with c = Phi^{-1}(3/4): f_e(u) = c phi(cu).
            const double c = boost::math::quantile(kStdNormal, 0.75);
            const auto phi = [&](double t) { return boost::math::pdf(kStdNormal, t); };
            ErrorLawInfo law;
            law.f0 = c * phi(0.0);
            law.fprime0 = 0.0;
            law.f1 = law.fm1 = c * phi(c);
            law.fprime1 = -c * c * c * phi(c);
            law.fprime_m1 = -law.fprime1;
            law.F_m1 = boost::math::cdf(kStdNormal, -c);
            return law;
        }
        case MarginalKind::ScaledStudentT: {
            const boost::math::students_t_distribution<double> t(model.innovation.df);
            const double c = boost::math::quantile(t, 0.75);
            const double nu = static_cast<double>(model.innovation.df);
            const auto pdf_deriv = [&](double x) {
                return boost::math::pdf(t, x) * (-(nu + 1.0) * x / (nu + x * x));
            };
            ErrorLawInfo law;
            law.f0 = c * boost::math::pdf(t, 0.0);
            law.fprime0 = 0.0;
            law.f1 = law.fm1 = c * boost::math::pdf(t, c);
            law.fprime1 = c * c * pdf_deriv(c);
            law.fprime_m1 = -law.fprime1;
            law.F_m1 = boost::math::cdf(t, -c);
            return law;
        }
        case MarginalKind::ScaledContaminated: {
            const double d = mix_quantile75(model.innovation);
            ErrorLawInfo law;
            law.f0 = d * mix_pdf(model.innovation, 0.0);
            law.fprime0 = 0.0;
            law.f1 = law.fm1 = d * mix_pdf(model.innovation, d);
            law.fprime1 = d * d * mix_pdf_deriv(model.innovation, d);
            law.fprime_m1 = -law.fprime1;
            law.F_m1 = mix_cdf(model.innovation, -d);
            return law;
        }
        case MarginalKind::Simulated: {
            auto art = calibration_artifact(model);
            {
                std::lock_guard<std::mutex> lock(g_artifact_mutex);
                if (art->law_ready) return art->law;
            }
            ErrorLawInfo law = law_from_sample(art->sorted_sample);
            std::lock_guard<std::mutex> lock(g_artifact_mutex);
            art->law = law;
            art->law_ready = true;
            return law;
        }
    }
    return {};
}

double error_cdf(const ErrorModel& model, double x) {
    switch (marginal_kind(model)) {
        case MarginalKind::ScaledNormal: {
            const double c = boost::math::quantile(kStdNormal, 0.75);
            return boost::math::cdf(kStdNormal, c * x);
        }
        case MarginalKind::ScaledStudentT: {
            const boost::math::students_t_distribution<double> t(model.innovation.df);
            const double c = boost::math::quantile(t, 0.75);
            return boost::math::cdf(t, c * x);
        }
        case MarginalKind::ScaledContaminated: {
            const double d = mix_quantile75(model.innovation);
            return mix_cdf(model.innovation, d * x);
        }
        case MarginalKind::Simulated: {
            auto art = calibration_artifact(model);
            const auto& xs = art->sorted_sample;
            return static_cast<double>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) /
                   static_cast<double>(xs.size());
        }
    }
    return 0.0;
}

}  // namespace ladreg
