#pragma once

#include <vector>

#include "ladreg/dataset.hpp"
#include "ladreg/kernel.hpp"

namespace ladreg {

enum class CvCriterion { LS, LAD };

struct CvConfig {
    std::vector<double> candidate_bandwidths;  // sorted ascending
    CvCriterion criterion = CvCriterion::LAD;
    KernelSpec kernel;
    int max_subjects_evaluated = 0;  // 0 = all; otherwise an evenly spaced subset
    bool approximate = false;        // grid + interpolation fast path
    int approx_grid_size = 101;
    int threads = 0;
};

struct CvScore {
    double bandwidth = 0.0;
    double score = 0.0;
    std::size_t scored_points = 0;
    std::size_t skipped_points = 0;  // held-out points with no kernel mass
};

struct CvResult {
    double b_star = 0.0;
    std::vector<CvScore> scores;
};

// Leave-one-subject-out prediction error of the jackknife location fit:
// each held-out point is predicted by refitting on the remaining subjects.
// Skipped (no-mass) points are counted; the score is loss per scored point.
CvScore cv_score(const Dataset& data, double bandwidth, CvCriterion criterion,
                 const KernelSpec& kernel, int max_subjects_evaluated = 0, int threads = 0,
                 bool approximate = false, int approx_grid_size = 101);

// Minimizing candidate; ties break toward the smaller bandwidth.
CvResult select_bandwidth(const Dataset& data, const CvConfig& config);

// 12 log-spaced candidates on [2(b-a)/N, (b-a)/4].
std::vector<double> default_candidates(const Dataset& data, int count = 12);

}  // namespace ladreg
