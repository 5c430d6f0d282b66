#include "ladreg/design.hpp"

#include <algorithm>
#include <cmath>

#include "ladreg/errors.hpp"
#include "ladreg/rng.hpp"

namespace ladreg {

std::size_t DesignSpec::total_points() const {
    std::size_t n = 0;
    for (int m : subject_sizes) n += static_cast<std::size_t>(m);
    return n;
}

DesignSpec uniform_design(int n_subjects, int points_per_subject, double a, double b,
                          double jitter_scale) {
    DesignSpec spec;
    spec.a = a;
    spec.b = b;
    spec.jitter_scale = jitter_scale;
    spec.subject_sizes.assign(static_cast<std::size_t>(n_subjects), points_per_subject);
    return spec;
}

std::vector<std::vector<double>> generate_design(const DesignSpec& spec, std::uint64_t seed) {
    if (spec.subject_sizes.empty()) throw ConfigError("generate_design: no subjects");
    if (!(spec.b > spec.a)) throw ConfigError("generate_design: domain endpoints need a < b");
    for (int m : spec.subject_sizes)
        if (m < 1) throw ConfigError("generate_design: subject sizes must be >= 1");

    const std::size_t n_total = spec.total_points();
    if (n_total < 2) throw ConfigError("generate_design: need at least 2 points in total");

    const double len = spec.b - spec.a;
    const double nn = static_cast<double>(n_total);
    const double jitter_max = spec.jitter_scale * len / (nn * nn);

    rng::Engine eng(rng::derive(seed, 0x0de51617u));
    std::vector<double> pooled(n_total);
    for (std::size_t k = 0; k < n_total; ++k) {
        double x = spec.a + static_cast<double>(k + 1) * len / (nn + 1.0);
        if (jitter_max > 0.0) x += (2.0 * eng.uniform() - 1.0) * jitter_max;
        pooled[k] = std::clamp(x, spec.a, spec.b);
    }

    const std::size_t n_subjects = spec.subject_sizes.size();
    std::vector<std::vector<double>> xs(n_subjects);
    for (std::size_t i = 0; i < n_subjects; ++i)
        xs[i].reserve(static_cast<std::size_t>(spec.subject_sizes[i]));

    std::size_t p = 0;
    while (p < n_total) {
        for (std::size_t i = 0; i < n_subjects && p < n_total; ++i) {
            if (xs[i].size() < static_cast<std::size_t>(spec.subject_sizes[i]))
                xs[i].push_back(pooled[p++]);
        }
    }
    for (auto& v : xs) std::sort(v.begin(), v.end());
    return xs;
}

DesignCheck validate_design(const DesignSpec& spec,
                            const std::vector<std::vector<double>>& subject_xs) {
    std::vector<double> pooled;
    for (const auto& v : subject_xs) pooled.insert(pooled.end(), v.begin(), v.end());
    std::sort(pooled.begin(), pooled.end());

    DesignCheck check;
    const double nn = static_cast<double>(pooled.size());
    const double target = (spec.b - spec.a) / nn;
    check.bound = (2.0 * spec.jitter_scale + 1.0) * (spec.b - spec.a) / (nn * nn);

    // Boundary gaps use the virtual endpoints x_0 = a and x_{N+1} = b.
    double prev = spec.a;
    for (double x : pooled) {
        check.max_gap_deviation = std::max(check.max_gap_deviation, std::abs(x - prev - target));
        prev = x;
    }
    check.max_gap_deviation = std::max(check.max_gap_deviation, std::abs(spec.b - prev - target));
    check.ok = check.max_gap_deviation <= check.bound + 1e-15;
    return check;
}

}  // namespace ladreg
