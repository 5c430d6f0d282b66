#pragma once

#include <stdexcept>
#include <string>

namespace ladreg {

// Bad configuration: unknown kernel family, invalid model parameters,
// non-contractive recursion coefficients, malformed options.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data: malformed CSV rows, empty files, non-finite values.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every kernel weight vanished at an evaluation point; the caller should
// widen the bandwidth or skip the grid point.
class NoMassError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// All grid points of a curve fit raised NoMass.
class DegenerateFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluation point outside the hull of an estimated curve's grid.
class ExtrapolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Cross-validation could not produce a score.
class CvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// rho_mu(x) == 0: the squared-bias/variance tradeoff has no finite optimum.
class DegenerateBiasError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ladreg
