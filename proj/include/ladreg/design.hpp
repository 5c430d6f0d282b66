#pragma once

#include <cstdint>
#include <vector>

namespace ladreg {

// Approximately-equispaced pooled design dealt to subjects.  jitter_scale is
// the maximum displacement of a pooled grid point in units of (b-a)/N^2, so
// the pooled gaps deviate from (b-a)/N by at most (2*jitter_scale+1)*(b-a)/N^2.
struct DesignSpec {
    double a = 0.0;
    double b = 1.0;
    std::vector<int> subject_sizes;
    double jitter_scale = 0.0;

    std::size_t total_points() const;
};

DesignSpec uniform_design(int n_subjects, int points_per_subject, double a = 0.0, double b = 1.0,
                          double jitter_scale = 0.0);

// Pooled grid a + k(b-a)/(N+1), k = 1..N, jittered, then dealt round-robin:
// cycling over subjects, each subject still missing points takes the next
// pooled point.  Each subject's points come back sorted ascending.
std::vector<std::vector<double>> generate_design(const DesignSpec& spec, std::uint64_t seed);

struct DesignCheck {
    double max_gap_deviation = 0.0;  // max_k |x_{k+1} - x_k - (b-a)/N|
    double bound = 0.0;              // (2*jitter_scale + 1) * (b-a) / N^2
    bool ok = false;
};

DesignCheck validate_design(const DesignSpec& spec,
                            const std::vector<std::vector<double>>& subject_xs);

}  // namespace ladreg
