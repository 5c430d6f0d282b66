#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ladreg/curves.hpp"
#include "ladreg/design.hpp"
#include "ladreg/error_model.hpp"

namespace ladreg {

struct Subject {
    std::string id;
    std::vector<double> x;
    std::vector<double> y;
};

// Multi-subject observations on [a,b]; per subject, x is sorted ascending.
struct Dataset {
    std::vector<Subject> subjects;
    double a = 0.0;
    double b = 1.0;

    std::size_t total_points() const;
};

// Y_{i,j} = mu(x_{i,j}) + s(x_{i,j}) e_{i,j}, one independent error path per
// subject on its own seed substream.
Dataset synthesize_dataset(const DesignSpec& design, const TrueCurves& curves,
                           const ErrorModel& model, std::uint64_t seed);

// Pooled x-sorted view for kernel-window queries.
struct PooledView {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<int> subject;
    double a = 0.0;
    double b = 1.0;

    static PooledView build(const Dataset& data);

    // Index range [first, last) with x in [lo, hi].
    std::pair<std::size_t, std::size_t> window(double lo, double hi) const;
};

}  // namespace ladreg
