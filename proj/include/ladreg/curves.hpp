#pragma once

#include <functional>

#include "ladreg/error_model.hpp"

namespace ladreg {

// True location/scale curves with the derivatives entering the bias
// formulas, plus the standardized error-law functionals.  Simulation and
// verification only; estimation never sees this.
struct TrueCurves {
    std::function<double(double)> mu, mu_d1, mu_d2;
    std::function<double(double)> s, s_d1, s_d2;
    ErrorLawInfo law;
};

// mu(x) = sin(2 pi x), s(x) = 0.5 + 0.25 x on [0,1]; both C^4 with
// non-vanishing curvature so every bias term is exercised.
TrueCurves default_test_curves(const ErrorModel& model);

TrueCurves constant_curves(double mu_value, double s_value, const ErrorModel& model);

}  // namespace ladreg
