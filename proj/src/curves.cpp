#include "ladreg/curves.hpp"

#include <cmath>

namespace ladreg {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

TrueCurves default_test_curves(const ErrorModel& model) {
    TrueCurves curves;
    curves.mu = [](double x) { return std::sin(kTwoPi * x); };
    curves.mu_d1 = [](double x) { return kTwoPi * std::cos(kTwoPi * x); };
    curves.mu_d2 = [](double x) { return -kTwoPi * kTwoPi * std::sin(kTwoPi * x); };
    curves.s = [](double x) { return 0.5 + 0.25 * x; };
    curves.s_d1 = [](double) { return 0.25; };
    curves.s_d2 = [](double) { return 0.0; };
    curves.law = error_law_info(model);
    return curves;
}

TrueCurves constant_curves(double mu_value, double s_value, const ErrorModel& model) {
    TrueCurves curves;
    curves.mu = [mu_value](double) { return mu_value; };
    curves.mu_d1 = [](double) { return 0.0; };
    curves.mu_d2 = [](double) { return 0.0; };
    curves.s = [s_value](double) { return s_value; };
    curves.s_d1 = [](double) { return 0.0; };
    curves.s_d2 = [](double) { return 0.0; };
    curves.law = error_law_info(model);
    return curves;
}

}  // namespace ladreg
