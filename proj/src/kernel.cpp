#include "ladreg/kernel.hpp"

#include <cmath>

#include "ladreg/errors.hpp"
#include "ladreg/quadrature.hpp"

namespace ladreg {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2 = 0.7071067811865476;

double base_eval(KernelFamily family, double u) {
    const double a = std::abs(u);
    if (a > 1.0) return 0.0;
    switch (family) {
        case KernelFamily::Epanechnikov:
            return 0.75 * (1.0 - u * u);
        case KernelFamily::Triweight: {
            const double t = 1.0 - u * u;
            return (35.0 / 32.0) * t * t * t;
        }
        case KernelFamily::Uniform:
            return 0.5;
    }
    return 0.0;
}

}  // namespace

double eval_kernel(const KernelSpec& spec, double u) {
    return base_eval(spec.family, u);
}

double eval_jackknife_kernel(const KernelSpec& spec, double u) {
    return 2.0 * base_eval(spec.family, u) - kInvSqrt2 * base_eval(spec.family, u * kInvSqrt2);
}

KernelMoments kernel_moments(KernelFamily family) {
    const auto k = [family](double u) { return base_eval(family, u); };
    KernelMoments m{};
    m.phi_k = quad::integrate([&](double u) { return k(u) * k(u); }, -1.0, 1.0, 1e-12);
    m.psi_k = 0.5 * quad::integrate([&](double u) { return u * u * k(u); }, -1.0, 1.0, 1e-12);
    const auto kstar = [&](double u) { return 2.0 * k(u) - kInvSqrt2 * k(u * kInvSqrt2); };
    // Kstar is only piecewise smooth: kinks at the inner support edges +-1.
    m.phi_kstar = quad::integrate_piecewise([&](double u) { return kstar(u) * kstar(u); },
                                            -kSqrt2, kSqrt2, {-1.0, 1.0}, 1e-12);
    return m;
}

KernelSpec make_kernel(KernelFamily family) {
    const KernelMoments m = kernel_moments(family);
    return KernelSpec{family, 1.0, m.phi_k, m.psi_k, m.phi_kstar};
}

double integral_k_kstar(const KernelSpec& spec, double c) {
    if (c < 0.0) throw ConfigError("integral_k_kstar: bandwidth ratio must be nonnegative");
    const auto f = [&](double u) {
        return eval_kernel(spec, u) * eval_jackknife_kernel(spec, c * u);
    };
    std::vector<double> breaks;
    if (c > 0.0) breaks = {-kSqrt2 / c, -1.0 / c, 1.0 / c, kSqrt2 / c};
    return quad::integrate_piecewise(f, -1.0, 1.0, std::move(breaks), 1e-12);
}

KernelFamily kernel_family_from_name(std::string_view name) {
    if (name == "epanechnikov") return KernelFamily::Epanechnikov;
    if (name == "triweight") return KernelFamily::Triweight;
    if (name == "uniform") return KernelFamily::Uniform;
    throw ConfigError("unknown kernel family: " + std::string(name));
}

std::string kernel_family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::Epanechnikov: return "epanechnikov";
        case KernelFamily::Triweight: return "triweight";
        case KernelFamily::Uniform: return "uniform";
    }
    return "unknown";
}

}  // namespace ladreg
