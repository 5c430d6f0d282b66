#pragma once

#include <algorithm>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ladreg::quad {

template <typename F>
double integrate(const F& f, double lo, double hi, double tol = 1e-12) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, tol);
}

// Integrate with the interval split at known kink locations (kernel support
// edges), so each piece is smooth and the quadrature reaches full accuracy.
template <typename F>
double integrate_piecewise(const F& f, double lo, double hi, std::vector<double> breaks,
                           double tol = 1e-12) {
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = std::max(lo, breaks[i]);
        const double b = std::min(hi, breaks[i + 1]);
        if (b > a) total += integrate(f, a, b, tol);
    }
    return total;
}

}  // namespace ladreg::quad
