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

// Dataset plus its coupled shadow (same design, errors coupled at lag k) and
// the kernel-induced weight function w_{i,j}(x) = K((x_{i,j}-x)/b).  The
// generating recipe stays attached so centering replications can be drawn.
struct EmpiricalProcessFrame {
    Dataset data;
    Dataset coupled;
    KernelSpec kernel;
    double bandwidth = 0.1;
    int coupling_lag = 0;

    DesignSpec design;
    TrueCurves curves;
    ErrorModel model;
    std::uint64_t seed = 0;
};

// lambda * log(N) rounded down, floored at 1.
int default_coupling_lag(std::size_t n_total, double lambda = 2.0);

EmpiricalProcessFrame make_frame(const DesignSpec& design, const TrueCurves& curves,
                                 const ErrorModel& model, double bandwidth,
                                 const KernelSpec& kernel, int coupling_lag, std::uint64_t seed);

// F_n(x,y) (or coupled F~_n): sum of weights over observations with Y <= y.
double eval_F(const EmpiricalProcessFrame& frame, double x, double y, bool use_coupled);

// sup over the grids of |F_n - F~_n|.  An empty y_grid means the exact
// y-candidate set: both processes are step functions jumping at observed
// values, so the union of Y and Y~ attains the sup.
double sup_coupling_discrepancy(const EmpiricalProcessFrame& frame,
                                std::span<const double> x_grid,
                                std::span<const double> y_grid = {});

struct ModulusResult {
    double delta_n = 0.0;
    double sup_abs = 0.0;       // max over grid and delta in {d/4, d/2, d} of |D_n|
    double centering_se = 0.0;  // MC standard error of the centering at the argmax
    double phi_n = 0.0;         // sup_x sum_ij w_{i,j}(x)^2 over the x grid
    double arg_x = 0.0, arg_y = 0.0, arg_delta = 0.0;
};

// Modulus of continuity of the centered weighted empirical process, measured
// for several delta_n in one pass.  E[F_n] is estimated by averaging F_n over
// `centering_reps` fresh error replications at the same design.  An empty
// y_grid defaults to the in-window observed values together with their
// delta-shifts, which is where the measured sup can jump.
std::vector<ModulusResult> modulus_of_continuity(const EmpiricalProcessFrame& frame,
                                                 std::span<const double> delta_ns,
                                                 std::span<const double> x_grid,
                                                 std::span<const double> y_grid = {},
                                                 int centering_reps = 200);

ModulusResult modulus_of_continuity(const EmpiricalProcessFrame& frame, double delta_n,
                                    std::span<const double> x_grid,
                                    std::span<const double> y_grid = {},
                                    int centering_reps = 200);

// Exact sup_x sum_ij w_{i,j}(x)^2 over the given x grid (the deterministic
// design quantity bounding the oscillation rate).
double weight_sum_sq_sup(const EmpiricalProcessFrame& frame, std::span<const double> x_grid);

}  // namespace ladreg
