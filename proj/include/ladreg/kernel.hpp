#pragma once

#include <string>
#include <string_view>

namespace ladreg {

// Bounded-support kernels on [-1,1].  Uniform has an unbounded derivative
// at the support edges and is kept for testing only; Epanechnikov is the
// default estimation kernel.
enum class KernelFamily { Epanechnikov, Triweight, Uniform };

// Moment constants are precomputed at construction so estimation loops
// never touch the quadrature.
//   phi_k     = integral of K(u)^2
//   psi_k     = (1/2) integral of u^2 K(u)
//   phi_kstar = integral of Kstar(u)^2, Kstar(u) = 2K(u) - K(u/sqrt2)/sqrt2
struct KernelSpec {
    KernelFamily family = KernelFamily::Epanechnikov;
    double support_halfwidth = 1.0;
    double phi_k = 0.0;
    double psi_k = 0.0;
    double phi_kstar = 0.0;
};

struct KernelMoments {
    double phi_k;
    double psi_k;
    double phi_kstar;
};

// K(u); exactly 0 for |u| > 1.
double eval_kernel(const KernelSpec& spec, double u);

// Kstar(u) = 2K(u) - 2^{-1/2} K(u/sqrt2); support [-sqrt2, sqrt2].
double eval_jackknife_kernel(const KernelSpec& spec, double u);

// Moment constants by adaptive quadrature (absolute tolerance 1e-10).
KernelMoments kernel_moments(KernelFamily family);

KernelSpec make_kernel(KernelFamily family);

// integral of K(u) Kstar(c*u) du, used by the scale-estimator variance.
double integral_k_kstar(const KernelSpec& spec, double c);

KernelFamily kernel_family_from_name(std::string_view name);
std::string kernel_family_name(KernelFamily family);

}  // namespace ladreg
