#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ladreg/asym.hpp"
#include "ladreg/bandwidth.hpp"
#include "ladreg/csv.hpp"
#include "ladreg/curves.hpp"
#include "ladreg/dataset.hpp"
#include "ladreg/design.hpp"
#include "ladreg/diagnostics.hpp"
#include "ladreg/errors.hpp"
#include "ladreg/estimate.hpp"
#include "ladreg/kernel.hpp"
#include "ladreg/rng.hpp"

using namespace ladreg;

namespace {

// Buffered output: every produced file ends with a terminal STATUS record,
// whether the command succeeded or died halfway.
class OutputWriter {
public:
    explicit OutputWriter(std::string path) : path_(std::move(path)) {}

    void line(const std::string& text) { lines_.push_back(text); }

    void finish(bool ok) {
        if (done_ || path_.empty()) return;
        std::ofstream out(path_, std::ios::binary);
        if (!out) throw DataError("cannot open output file: " + path_);
        for (const auto& l : lines_) out << l << '\n';
        out << (ok ? "STATUS=ok" : "STATUS=error") << '\n';
        done_ = true;
    }

    bool finished() const { return done_; }

private:
    std::string path_;
    std::vector<std::string> lines_;
    bool done_ = false;
};

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
    return out;
}

// Error model spec strings: kind plus colon-separated key=value parts, e.g.
//   iid
//   iid:innovation=t(4)
//   mdependent:m=2:mixer=balanced
//   noncausal:rho=0.5
//   tar:a=0.4:b=-0.3    arch:a=0.6:b=0.5    rc:a=0.3:b=0.4    expar:a=0.4:b=0.3:c=1
ErrorModel parse_error_model(const std::string& text) {
    std::stringstream ss(text);
    std::string kind;
    std::getline(ss, kind, ':');
    std::map<std::string, std::string> kv;
    std::string part;
    while (std::getline(ss, part, ':')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw ConfigError("error-model part '" + part + "' is not key=value");
        kv[part.substr(0, eq)] = part.substr(eq + 1);
    }

    Innovation innov = std_normal_innovation();
    if (auto it = kv.find("innovation"); it != kv.end()) {
        const std::string& v = it->second;
        if (v == "normal") {
            innov = std_normal_innovation();
        } else if (v.rfind("t(", 0) == 0 && v.back() == ')') {
            innov = student_t_innovation(std::stoi(v.substr(2, v.size() - 3)));
        } else if (v.rfind("cn(", 0) == 0 && v.back() == ')') {
            const auto args = parse_double_list(v.substr(3, v.size() - 4));
            if (args.size() != 2) throw ConfigError("cn(eps,scale) takes two arguments");
            innov = contaminated_normal_innovation(args[0], args[1]);
        } else {
            throw ConfigError("unknown innovation spec: " + v);
        }
    }
    const auto num = [&](const char* key, double fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : std::stod(it->second);
    };

    if (kind == "iid") return make_iid(innov);
    if (kind == "mdependent") {
        const int m = static_cast<int>(num("m", 2));
        std::vector<double> mixer;
        if (auto it = kv.find("mixer"); it != kv.end())
            mixer = it->second == "balanced" ? balanced_m2_mixer()
                                             : parse_double_list(it->second);
        return make_mdependent(m, std::move(mixer), innov);
    }
    if (kind == "noncausal")
        return make_noncausal_linear(num("rho", 0.5), static_cast<int>(num("lag", 0)), innov);
    if (kind == "tar") return make_threshold_ar(num("a", 0.4), num("b", -0.3), innov);
    if (kind == "arch") return make_arch(num("a", 0.6), num("b", 0.5), innov);
    if (kind == "rc") return make_random_coefficient(num("a", 0.3), num("b", 0.4), innov);
    if (kind == "expar")
        return make_exp_ar(num("a", 0.4), num("b", 0.3), num("c", 1.0), innov);
    throw ConfigError("unknown error model kind: " + kind);
}

struct Options {
    std::string config_path;
    std::string input_path;
    std::string output_path = "ladreg_out.csv";
    std::uint64_t seed = 1;
    std::string kernel = "epanechnikov";
    int threads = 0;

    int subjects = 22;
    int points = 24;
    std::string sizes;
    double jitter = 0.5;
    double domain_a = 0.0;
    double domain_b = 1.0;
    std::string error_model = "iid";

    double bandwidth_mu = 0.1;
    double bandwidth_s = 0.1;
    int grid_size = 101;
    double epsilon = -1.0;
    bool clamp_negative_scale = false;

    std::string criterion = "lad";
    std::string candidates;
    int num_candidates = 12;
    int max_subjects = 0;
    bool approximate = false;

    std::string sweep = "500,1000,2000,4000";
    std::string deltas = "0.4,0.2,0.1,0.05";
    double lambda = 2.0;
    int centering_reps = 200;
    int x_grid_size = 11;

    std::string target = "clt-mu";
    double x_eval = 0.3;
    int replications = 500;

    double shift = 3.0;
    double fraction = 0.1;
    double noise_scale = 0.15;
    double mu_amplitude = 0.5;
};

std::map<std::string, std::string> load_config(const std::string& path) {
    std::map<std::string, std::string> kv;
    if (path.empty()) return kv;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = value;
    }
    return kv;
}

// Flags win over the config file: only unset options are overridden.
class ConfigBinder {
public:
    ConfigBinder(CLI::App* cmd, const std::map<std::string, std::string>& kv)
        : cmd_(cmd), kv_(kv) {}

    void set(const std::string& name, double& field) const {
        if (auto v = lookup(name)) field = std::stod(*v);
    }
    void set(const std::string& name, int& field) const {
        if (auto v = lookup(name)) field = std::stoi(*v);
    }
    void set(const std::string& name, std::uint64_t& field) const {
        if (auto v = lookup(name)) field = std::stoull(*v);
    }
    void set(const std::string& name, std::string& field) const {
        if (auto v = lookup(name)) field = *v;
    }
    void set(const std::string& name, bool& field) const {
        if (auto v = lookup(name)) field = (*v == "1" || *v == "true" || *v == "yes");
    }

private:
    std::optional<std::string> lookup(const std::string& name) const {
        const auto it = kv_.find(name);
        if (it == kv_.end()) return std::nullopt;
        const CLI::Option* opt = cmd_->get_option_no_throw("--" + name);
        if (opt != nullptr && opt->count() > 0) return std::nullopt;
        return it->second;
    }

    CLI::App* cmd_;
    const std::map<std::string, std::string>& kv_;
};

DesignSpec design_from_options(const Options& opt) {
    DesignSpec spec;
    spec.a = opt.domain_a;
    spec.b = opt.domain_b;
    spec.jitter_scale = opt.jitter;
    if (!opt.sizes.empty())
        spec.subject_sizes = parse_int_list(opt.sizes);
    else
        spec.subject_sizes.assign(static_cast<std::size_t>(opt.subjects), opt.points);
    return spec;
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

std::string fmt(double v) { return format_double(v); }

void cmd_simulate(const Options& opt, OutputWriter& out) {
    const ErrorModel model = parse_error_model(opt.error_model);
    const TrueCurves curves = default_test_curves(model);
    const Dataset data = synthesize_dataset(design_from_options(opt), curves, model, opt.seed);
    out.line("subject_id,x,y");
    for (const auto& subj : data.subjects)
        for (std::size_t j = 0; j < subj.x.size(); ++j)
            out.line(subj.id + "," + fmt(subj.x[j]) + "," + fmt(subj.y[j]));
}

void cmd_fit(const Options& opt, OutputWriter& out) {
    if (opt.input_path.empty()) throw ConfigError("fit requires --input");
    const Dataset data = ingest_csv(opt.input_path);

    FitConfig config;
    config.bandwidth_mu = opt.bandwidth_mu;
    config.bandwidth_s = opt.bandwidth_s;
    config.kernel = make_kernel(kernel_family_from_name(opt.kernel));
    config.grid_size = opt.grid_size;
    config.epsilon_margin = opt.epsilon;
    config.clamp_negative_scale = opt.clamp_negative_scale;
    config.threads = opt.threads;
    const CurvePair fit = fit_curves(data, config);

    const PooledView view = PooledView::build(data);
    out.line("x,mu,s,mu_raw,s_raw,n_eff_mu,n_eff_s,s_negative");
    for (std::size_t g = 0; g < fit.mu.grid.size(); ++g) {
        const double x = fit.mu.grid[g];
        double mu_raw = std::numeric_limits<double>::quiet_NaN();
        double s_raw = std::numeric_limits<double>::quiet_NaN();
        try {
            mu_raw = fit_mu_raw(view, x, config.bandwidth_mu, config.kernel);
            s_raw = fit_s_raw(view, x, config.bandwidth_s, fit.mu.values[g], config.kernel);
        } catch (const NoMassError&) {
        }
        const bool negative = !std::isnan(fit.s.values[g]) && fit.s.values[g] < 0.0;
        out.line(join_csv({fmt(x), fmt(fit.mu.values[g]), fmt(fit.s.values[g]), fmt(mu_raw),
                           fmt(s_raw), std::to_string(fit.mu.n_effective[g]),
                           std::to_string(fit.s.n_effective[g]), negative ? "1" : "0"}));
    }
}

void cmd_bandwidth(const Options& opt, OutputWriter& out) {
    if (opt.input_path.empty()) throw ConfigError("bandwidth requires --input");
    const Dataset data = ingest_csv(opt.input_path);

    CvConfig config;
    config.kernel = make_kernel(kernel_family_from_name(opt.kernel));
    if (opt.criterion != "ls" && opt.criterion != "lad")
        throw ConfigError("criterion must be ls or lad");
    config.criterion = opt.criterion == "ls" ? CvCriterion::LS : CvCriterion::LAD;
    config.candidate_bandwidths = opt.candidates.empty()
                                      ? default_candidates(data, opt.num_candidates)
                                      : parse_double_list(opt.candidates);
    config.max_subjects_evaluated = opt.max_subjects;
    config.approximate = opt.approximate;
    config.threads = opt.threads;

    const CvResult result = select_bandwidth(data, config);
    out.line("bandwidth,score,scored_points,skipped_points,selected");
    for (const auto& row : result.scores)
        out.line(join_csv({fmt(row.bandwidth), fmt(row.score), std::to_string(row.scored_points),
                           std::to_string(row.skipped_points),
                           row.bandwidth == result.b_star ? "1" : "0"}));
}

void cmd_diagnose(const Options& opt, OutputWriter& out) {
    const ErrorModel model = parse_error_model(opt.error_model);
    const TrueCurves curves = default_test_curves(model);
    const KernelSpec kernel = make_kernel(kernel_family_from_name(opt.kernel));

    out.line("metric,n_total,param,value");

    // Coupling discrepancy along the size sweep, lag = floor(lambda log N).
    for (int n_total : parse_int_list(opt.sweep)) {
        const int m = opt.points;
        const int n_subj = std::max(1, n_total / m);
        DesignSpec design = uniform_design(n_subj, m, opt.domain_a, opt.domain_b, opt.jitter);
        const int lag = default_coupling_lag(design.total_points(), opt.lambda);
        const double b = opt.bandwidth_mu;
        const EmpiricalProcessFrame frame =
            make_frame(design, curves, model, b, kernel, lag,
                       rng::derive(opt.seed, static_cast<std::uint64_t>(n_total)));
        const double eps = std::max(b, 0.05);
        const std::vector<double> x_grid =
            make_grid(design.a + eps, design.b - eps, opt.x_grid_size);
        const double sup = sup_coupling_discrepancy(frame, x_grid);
        out.line(join_csv({"coupling_sup", std::to_string(frame.data.total_points()),
                           "k=" + std::to_string(lag), fmt(sup)}));
    }

    // Modulus of continuity across the delta sweep at the largest size.
    {
        const auto sizes = parse_int_list(opt.sweep);
        const int n_total = sizes.back();
        const int m = opt.points;
        DesignSpec design =
            uniform_design(std::max(1, n_total / m), m, opt.domain_a, opt.domain_b, opt.jitter);
        const int lag = default_coupling_lag(design.total_points(), opt.lambda);
        const EmpiricalProcessFrame frame =
            make_frame(design, curves, model, opt.bandwidth_mu, kernel, lag,
                       rng::derive(opt.seed, 0xD1A6u));
        const double eps = std::max(opt.bandwidth_mu, 0.05);
        const std::vector<double> x_grid =
            make_grid(design.a + eps, design.b - eps, opt.x_grid_size);
        const std::vector<double> deltas = parse_double_list(opt.deltas);
        const auto results =
            modulus_of_continuity(frame, deltas, x_grid, {}, opt.centering_reps);
        for (const auto& res : results) {
            out.line(join_csv({"modulus", std::to_string(frame.data.total_points()),
                               "delta=" + fmt(res.delta_n), fmt(res.sup_abs)}));
            out.line(join_csv({"modulus_centering_se",
                               std::to_string(frame.data.total_points()),
                               "delta=" + fmt(res.delta_n), fmt(res.centering_se)}));
        }
        if (!results.empty())
            out.line(join_csv({"phi_n", std::to_string(frame.data.total_points()), "",
                               fmt(results.front().phi_n)}));
    }
}

void report_line(OutputWriter& out, const std::string& target, const Options& opt,
                 std::size_t n_total, const McReport& report) {
    out.line(
        "target,x,n_total,bandwidth,replications,failures,empirical_bias,"
        "empirical_variance,theoretical_variance,variance_ratio,ci_coverage,ad_statistic");
    out.line(join_csv({target, fmt(opt.x_eval), std::to_string(n_total), fmt(report.bandwidth),
                       std::to_string(report.replications), std::to_string(report.failures),
                       fmt(report.empirical_bias), fmt(report.empirical_variance),
                       fmt(report.theoretical_variance), fmt(report.variance_ratio),
                       fmt(report.ci_coverage), fmt(report.ad_statistic)}));
}

void cmd_verify(const Options& opt, OutputWriter& out) {
    const ErrorModel model = parse_error_model(opt.error_model);
    const TrueCurves curves = default_test_curves(model);
    const KernelSpec kernel = make_kernel(kernel_family_from_name(opt.kernel));
    const DesignSpec design = design_from_options(opt);

    if (opt.target == "clt-mu" || opt.target == "clt-mu-jackknife") {
        CltMuOptions options;
        options.estimator = opt.target == "clt-mu" ? MuEstimator::Raw : MuEstimator::Jackknife;
        options.replications = opt.replications;
        options.threads = opt.threads;
        options.kernel = kernel;
        const McReport report =
            verify_clt_mu(design, curves, model, opt.x_eval, options, opt.seed);
        report_line(out, opt.target, opt, design.total_points(), report);
        return;
    }
    if (opt.target == "clt-s") {
        const McReport report =
            verify_clt_s(design, curves, model, opt.x_eval, opt.bandwidth_mu, opt.bandwidth_s,
                         opt.replications, opt.threads, opt.seed);
        report_line(out, opt.target, opt, design.total_points(), report);
        return;
    }
    if (opt.target == "bahadur") {
        std::vector<DesignSpec> designs;
        for (int n_total : parse_int_list(opt.sweep))
            designs.push_back(uniform_design(std::max(1, n_total / opt.points), opt.points,
                                             opt.domain_a, opt.domain_b, opt.jitter));
        const auto rows = verify_bahadur_remainder(designs, curves, model, opt.x_eval,
                                                   opt.replications, opt.threads, opt.seed);
        out.line(
            "n_total,bandwidth,median_abs_remainder,median_abs_leading,remainder_ratio,"
            "q_mean_in_se,leading_variance_ratio");
        for (const auto& row : rows)
            out.line(join_csv({fmt(row.n_total), fmt(row.bandwidth),
                               fmt(row.median_abs_remainder), fmt(row.median_abs_leading),
                               fmt(row.remainder_ratio), fmt(row.q_mean_in_se),
                               fmt(row.leading_variance_ratio)}));
        return;
    }
    throw ConfigError("unknown verify target: " + opt.target);
}

void cmd_demo_robustness(const Options& opt, OutputWriter& out) {
    const ErrorModel model = parse_error_model(opt.error_model);
    // Hormone-profile analog: moderate curvature and measurement noise that
    // is small against the 3-unit perturbation, as in the motivating
    // longitudinal data.
    TrueCurves curves = default_test_curves(model);
    curves.mu = [a = opt.mu_amplitude](double x) { return a * std::sin(6.283185307179586 * x); };
    curves.mu_d1 = [a = opt.mu_amplitude](double x) {
        return a * 6.283185307179586 * std::cos(6.283185307179586 * x);
    };
    curves.mu_d2 = [a = opt.mu_amplitude](double x) {
        return -a * 39.47841760435743 * std::sin(6.283185307179586 * x);
    };
    curves.s = [s = opt.noise_scale](double) { return s; };
    curves.s_d1 = [](double) { return 0.0; };
    curves.s_d2 = [](double) { return 0.0; };
    const KernelSpec kernel = make_kernel(kernel_family_from_name(opt.kernel));
    const DesignSpec design = design_from_options(opt);
    const Dataset original = synthesize_dataset(design, curves, model, opt.seed);

    const std::size_t n_subjects = original.subjects.size();
    const std::size_t n_perturb = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(opt.fraction * n_subjects)));
    if (n_perturb >= n_subjects) throw ConfigError("perturbed fraction too large");

    Dataset removed = original;
    removed.subjects.erase(removed.subjects.begin(),
                           removed.subjects.begin() + static_cast<std::ptrdiff_t>(n_perturb));
    Dataset shifted = original;
    for (std::size_t i = 0; i < n_perturb; ++i)
        for (auto& y : shifted.subjects[i].y) y -= opt.shift;

    const double b = opt.bandwidth_mu;
    const double eps = 1.4142135623730951 * b;
    const std::vector<double> grid = make_grid(design.a + eps, design.b - eps, opt.grid_size);

    struct Fits {
        std::vector<double> lad, mean;
    };
    auto fit_both = [&](const Dataset& data) {
        const PooledView view = PooledView::build(data);
        Fits fits;
        for (double x : grid) {
            try {
                fits.lad.push_back(fit_mu_raw(view, x, b, kernel));
                fits.mean.push_back(nadaraya_watson(view, x, b, kernel));
            } catch (const NoMassError&) {
                fits.lad.push_back(std::numeric_limits<double>::quiet_NaN());
                fits.mean.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        return fits;
    };
    const Fits base = fit_both(original);
    const Fits no_outliers = fit_both(removed);
    const Fits pushed = fit_both(shifted);

    auto sup_shift = [&](const std::vector<double>& lhs, const std::vector<double>& rhs) {
        double sup = 0.0;
        for (std::size_t g = 0; g < lhs.size(); ++g)
            if (!std::isnan(lhs[g]) && !std::isnan(rhs[g]))
                sup = std::max(sup, std::abs(lhs[g] - rhs[g]));
        return sup;
    };

    out.line("method,scenario,sup_shift");
    out.line(join_csv({"lad", "original", fmt(0.0)}));
    out.line(join_csv({"local_mean", "original", fmt(0.0)}));
    out.line(join_csv({"lad", "removed", fmt(sup_shift(base.lad, no_outliers.lad))}));
    out.line(join_csv({"local_mean", "removed", fmt(sup_shift(base.mean, no_outliers.mean))}));
    const double lad_shift = sup_shift(base.lad, pushed.lad);
    const double mean_shift = sup_shift(base.mean, pushed.mean);
    out.line(join_csv({"lad", "shifted", fmt(lad_shift)}));
    out.line(join_csv({"local_mean", "shifted", fmt(mean_shift)}));
    out.line(join_csv({"ratio_lad_over_local_mean", "shifted", fmt(lad_shift / mean_shift)}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Least-absolute-deviation location/scale curve estimation for dependent "
                 "multi-subject data"};
    app.require_subcommand(1);

    Options opt;
    std::vector<std::pair<CLI::App*, std::string>> commands;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "flat key=value config file");
        cmd->add_option("--seed", opt.seed, "master seed (deterministic, no wall-clock)");
        cmd->add_option("--kernel", opt.kernel, "epanechnikov|triweight|uniform");
        cmd->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
        cmd->add_option("--output", opt.output_path, "output CSV path");
        return cmd;
    };
    auto add_design = [&](CLI::App* cmd) {
        cmd->add_option("--subjects", opt.subjects, "number of subjects");
        cmd->add_option("--points", opt.points, "points per subject");
        cmd->add_option("--sizes", opt.sizes, "explicit subject sizes, comma separated");
        cmd->add_option("--jitter", opt.jitter, "design jitter scale");
        cmd->add_option("--a", opt.domain_a, "domain left endpoint");
        cmd->add_option("--b", opt.domain_b, "domain right endpoint");
        cmd->add_option("--error-model", opt.error_model, "error process spec");
        return cmd;
    };

    CLI::App* simulate = add_design(add_common(
        app.add_subcommand("simulate", "synthesize a dataset from the built-in test curves")));
    commands.push_back({simulate, "simulate"});

    CLI::App* fit =
        add_common(app.add_subcommand("fit", "fit jackknife location/scale curves"));
    fit->add_option("--input", opt.input_path, "input CSV (subject_id,x,y)");
    fit->add_option("--bandwidth-mu", opt.bandwidth_mu, "location bandwidth");
    fit->add_option("--bandwidth-s", opt.bandwidth_s, "scale bandwidth");
    fit->add_option("--grid", opt.grid_size, "grid size");
    fit->add_option("--epsilon", opt.epsilon, "interior margin (default sqrt2*max(b,h))");
    fit->add_flag("--clamp-negative-scale", opt.clamp_negative_scale,
                  "clamp negative jackknife scale values at zero");
    commands.push_back({fit, "fit"});

    CLI::App* bandwidth =
        add_common(app.add_subcommand("bandwidth", "leave-one-subject-out CV bandwidth"));
    bandwidth->add_option("--input", opt.input_path, "input CSV (subject_id,x,y)");
    bandwidth->add_option("--criterion", opt.criterion, "lad|ls");
    bandwidth->add_option("--candidates", opt.candidates, "explicit candidate bandwidths");
    bandwidth->add_option("--num-candidates", opt.num_candidates, "size of the default grid");
    bandwidth->add_option("--max-subjects", opt.max_subjects, "cap on evaluated subjects");
    bandwidth->add_flag("--approximate", opt.approximate, "grid+interpolation fast path");
    commands.push_back({bandwidth, "bandwidth"});

    CLI::App* diagnose = add_design(add_common(app.add_subcommand(
        "diagnose", "coupling discrepancy and modulus-of-continuity tables")));
    diagnose->add_option("--bandwidth-mu", opt.bandwidth_mu, "weight bandwidth");
    diagnose->add_option("--sweep", opt.sweep, "total sizes for the coupling sweep");
    diagnose->add_option("--deltas", opt.deltas, "delta_n values for the modulus");
    diagnose->add_option("--lambda", opt.lambda, "coupling lag multiplier");
    diagnose->add_option("--centering-reps", opt.centering_reps, "centering replications");
    diagnose->add_option("--x-grid-size", opt.x_grid_size, "evaluation x grid size");
    commands.push_back({diagnose, "diagnose"});

    CLI::App* verify = add_design(add_common(
        app.add_subcommand("verify", "Monte Carlo verification of the asymptotic formulas")));
    verify->add_option("--target", opt.target, "clt-mu|clt-mu-jackknife|clt-s|bahadur");
    verify->add_option("--x", opt.x_eval, "evaluation point");
    verify->add_option("--replications", opt.replications, "Monte Carlo replications");
    verify->add_option("--bandwidth-mu", opt.bandwidth_mu, "location bandwidth (clt-s)");
    verify->add_option("--bandwidth-s", opt.bandwidth_s, "scale bandwidth (clt-s)");
    verify->add_option("--sweep", opt.sweep, "total sizes for the bahadur sweep");
    commands.push_back({verify, "verify"});

    CLI::App* demo = add_design(add_common(app.add_subcommand(
        "demo-robustness", "outlier-subject perturbation comparison, LAD vs local mean")));
    demo->add_option("--bandwidth-mu", opt.bandwidth_mu, "fit bandwidth");
    demo->add_option("--grid", opt.grid_size, "grid size");
    demo->add_option("--shift", opt.shift, "downward shift applied to perturbed subjects");
    demo->add_option("--fraction", opt.fraction, "fraction of subjects perturbed");
    demo->add_option("--noise-scale", opt.noise_scale, "constant scale curve of the analog");
    demo->add_option("--mu-amplitude", opt.mu_amplitude, "location curve amplitude of the analog");
    commands.push_back({demo, "demo-robustness"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cout << "STATUS=error" << std::endl;
        return 2;
    }

    CLI::App* active = nullptr;
    std::string name;
    for (auto& [cmd, cmd_name] : commands)
        if (cmd->parsed()) {
            active = cmd;
            name = cmd_name;
        }

    OutputWriter out(opt.output_path);
    try {
        const auto kv = load_config(opt.config_path);
        const ConfigBinder bind(active, kv);
        bind.set("seed", opt.seed);
        bind.set("kernel", opt.kernel);
        bind.set("threads", opt.threads);
        bind.set("output", opt.output_path);
        bind.set("input", opt.input_path);
        bind.set("subjects", opt.subjects);
        bind.set("points", opt.points);
        bind.set("sizes", opt.sizes);
        bind.set("jitter", opt.jitter);
        bind.set("a", opt.domain_a);
        bind.set("b", opt.domain_b);
        bind.set("error-model", opt.error_model);
        bind.set("bandwidth-mu", opt.bandwidth_mu);
        bind.set("bandwidth-s", opt.bandwidth_s);
        bind.set("grid", opt.grid_size);
        bind.set("epsilon", opt.epsilon);
        bind.set("clamp-negative-scale", opt.clamp_negative_scale);
        bind.set("criterion", opt.criterion);
        bind.set("candidates", opt.candidates);
        bind.set("num-candidates", opt.num_candidates);
        bind.set("max-subjects", opt.max_subjects);
        bind.set("approximate", opt.approximate);
        bind.set("sweep", opt.sweep);
        bind.set("deltas", opt.deltas);
        bind.set("lambda", opt.lambda);
        bind.set("centering-reps", opt.centering_reps);
        bind.set("x-grid-size", opt.x_grid_size);
        bind.set("target", opt.target);
        bind.set("x", opt.x_eval);
        bind.set("replications", opt.replications);
        bind.set("shift", opt.shift);
        bind.set("fraction", opt.fraction);
        bind.set("noise-scale", opt.noise_scale);
        bind.set("mu-amplitude", opt.mu_amplitude);

        // Recreate the writer in case the config file moved the output path.
        out = OutputWriter(opt.output_path);

        if (name == "simulate")
            cmd_simulate(opt, out);
        else if (name == "fit")
            cmd_fit(opt, out);
        else if (name == "bandwidth")
            cmd_bandwidth(opt, out);
        else if (name == "diagnose")
            cmd_diagnose(opt, out);
        else if (name == "verify")
            cmd_verify(opt, out);
        else
            cmd_demo_robustness(opt, out);

        out.finish(true);
        std::cout << "wrote " << opt.output_path << "\nSTATUS=ok" << std::endl;
        return 0;
    } catch (const ConfigError& e) {
        if (!out.finished()) out.finish(false);
        std::cerr << "error: " << e.what() << std::endl;
        std::cout << "STATUS=error" << std::endl;
        return 2;
    } catch (const DataError& e) {
        if (!out.finished()) out.finish(false);
        std::cerr << "error: " << e.what() << std::endl;
        std::cout << "STATUS=error" << std::endl;
        return 3;
    } catch (const std::exception& e) {
        if (!out.finished()) out.finish(false);
        std::cerr << "error: " << e.what() << std::endl;
        std::cout << "STATUS=error" << std::endl;
        return 4;
    }
}
