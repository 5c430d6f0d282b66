#include "ladreg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ladreg/errors.hpp"
#include "ladreg/rng.hpp"

namespace ladreg {

std::size_t Dataset::total_points() const {
    std::size_t n = 0;
    for (const auto& s : subjects) n += s.x.size();
    return n;
}

Dataset synthesize_dataset(const DesignSpec& design, const TrueCurves& curves,
                           const ErrorModel& model, std::uint64_t seed) {
    const auto xs = generate_design(design, rng::derive(seed, 0xDE51u));
    Dataset data;
    data.a = design.a;
    data.b = design.b;
    data.subjects.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Subject& subj = data.subjects[i];
        subj.id = "s" + std::to_string(i + 1);
        subj.x = xs[i];
        const std::vector<double> e =
            simulate_errors(model, subj.x.size(), 1000, rng::derive(seed, 0x5CB17u, i));
        subj.y.resize(subj.x.size());
        for (std::size_t j = 0; j < subj.x.size(); ++j)
            subj.y[j] = curves.mu(subj.x[j]) + curves.s(subj.x[j]) * e[j];
    }
    return data;
}

PooledView PooledView::build(const Dataset& data) {
    PooledView view;
    view.a = data.a;
    view.b = data.b;
    const std::size_t n = data.total_points();
    std::vector<std::size_t> order(n);
    std::vector<double> x(n), y(n);
    std::vector<int> subj(n);
    std::size_t p = 0;
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        const Subject& s = data.subjects[i];
        for (std::size_t j = 0; j < s.x.size(); ++j, ++p) {
            x[p] = s.x[j];
            y[p] = s.y[j];
            subj[p] = static_cast<int>(i);
        }
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return x[l] < x[r]; });
    view.x.resize(n);
    view.y.resize(n);
    view.subject.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        view.x[k] = x[order[k]];
        view.y[k] = y[order[k]];
        view.subject[k] = subj[order[k]];
    }
    return view;
}

std::pair<std::size_t, std::size_t> PooledView::window(double lo, double hi) const {
    const auto first = std::lower_bound(x.begin(), x.end(), lo);
    const auto last = std::upper_bound(x.begin(), x.end(), hi);
    return {static_cast<std::size_t>(first - x.begin()),
            static_cast<std::size_t>(last - x.begin())};
}

}  // namespace ladreg
