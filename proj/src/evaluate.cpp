#include "sigver/evaluate.hpp"

#include "sigver/errors.hpp"
#include "sigver/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <thread>

namespace sigver {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct ScoredSample {
    int acceptance_count = 0;
    int d = 0;
};

} // namespace

std::vector<double> make_tau_grid(double tau_min, double tau_max, double tau_step) {
    if (tau_step <= 0.0) throw config_error("tau step must be positive");
    if (tau_min < 0.0 || tau_max > 1.0 || tau_min > tau_max)
        throw config_error("tau grid must satisfy 0 <= min <= max <= 1");
    std::vector<double> grid;
    const int n = (int)std::floor((tau_max - tau_min) / tau_step + 1e-9) + 1;
    for (int i = 0; i < n; ++i) grid.push_back(tau_min + i * tau_step);
    return grid;
}

ErrorCurve sweep_thresholds(const std::map<std::string, UserModel>& models,
                            const Dataset& data, const TrialSplit& split,
                            const std::vector<double>& tau_grid) {
    if (tau_grid.empty()) throw config_error("tau grid is empty");
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end()))
        throw config_error("tau grid must be ascending");

    auto model_of = [&](const std::string& user) -> const UserModel& {
        auto it = models.find(user);
        if (it == models.end()) throw data_error("no model for user " + user);
        return it->second;
    };

    std::vector<ScoredSample> genuine_scores;
    std::vector<ScoredSample> forgery_scores;
    for (const auto& [user, sample_ids] : split.test_genuine) {
        const UserModel& model = model_of(user);
        for (int idx : sample_ids) {
            const auto result = verify(data.samples[(std::size_t)idx].features, model);
            genuine_scores.push_back({result.acceptance_count, (int)model.selected_indices.size()});
        }
    }
    for (const auto& [user, sample_ids] : split.test_forgery) {
        const UserModel& model = model_of(user);
        for (int idx : sample_ids) {
            const auto result = verify(data.samples[(std::size_t)idx].features, model);
            forgery_scores.push_back({result.acceptance_count, (int)model.selected_indices.size()});
        }
    }

    ErrorCurve curve;
    for (double tau : tau_grid) {
        int false_rejects = 0;
        for (const auto& s : genuine_scores)
            if (s.acceptance_count < required_count(tau, s.d)) ++false_rejects;
        int false_accepts = 0;
        for (const auto& s : forgery_scores)
            if (s.acceptance_count >= required_count(tau, s.d)) ++false_accepts;
        CurvePoint point;
        point.tau = tau;
        point.frr = genuine_scores.empty() ? 0.0 : (double)false_rejects / genuine_scores.size();
        point.far = forgery_scores.empty() ? 0.0 : (double)false_accepts / forgery_scores.size();
        curve.points.push_back(point);
    }
    return curve;
}

double compute_eer(const ErrorCurve& curve) {
    if (curve.points.empty()) throw data_error("cannot compute EER of an empty curve");
    const auto& pts = curve.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double diff = pts[i].far - pts[i].frr;
        if (diff == 0.0) return pts[i].far;
        if (i + 1 < pts.size()) {
            const double next_diff = pts[i + 1].far - pts[i + 1].frr;
            if (diff * next_diff < 0.0) {
                // linear segments cross between the two grid points
                const double t = diff / (diff - next_diff);
                return pts[i].far + t * (pts[i + 1].far - pts[i].far);
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (std::abs(pts[i].far - pts[i].frr) < std::abs(pts[best].far - pts[best].frr)) best = i;
    return 0.5 * (pts[best].far + pts[best].frr);
}

ProtocolReport run_protocol(const Dataset& data, const EvalConfig& config) {
    if (config.n_trials < 1) throw config_error("trial count must be >= 1");
    const auto tau_grid = make_tau_grid(config.tau_min, config.tau_max, config.tau_step);
    const auto users = data.users();

    ProtocolReport report;
    report.protocol = protocol_name(config.protocol);
    report.config = config;
    report.trial_eers.resize((std::size_t)config.n_trials);
    report.trial_curves.resize((std::size_t)config.n_trials);

    auto run_trial = [&](int trial) {
        const std::uint64_t trial_seed = Rng::mix(config.master_seed, (std::uint64_t)trial);
        const TrialSplit split = make_trial_split(data, config.protocol, trial_seed);
        std::map<std::string, UserModel> models;
        for (std::size_t u = 0; u < users.size(); ++u) {
            const auto& user = users[u];
            const Eigen::MatrixXd train = data.matrix(split.train.at(user));
            models.emplace(user, enroll_user(user, train, config.enroll,
                                             Rng::mix(trial_seed, (std::uint64_t)u + 1)));
        }
        ErrorCurve curve = sweep_thresholds(models, data, split, tau_grid);
        report.trial_eers[(std::size_t)trial] = compute_eer(curve);
        report.trial_curves[(std::size_t)trial] = std::move(curve);
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        for (int t = 0; t < config.n_trials; ++t) run_trial(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> workers;
        const int n_workers = std::min(jobs, config.n_trials);
        workers.reserve((std::size_t)n_workers);
        for (int w = 0; w < n_workers; ++w)
            workers.emplace_back([&] {
                for (int t = next.fetch_add(1); t < config.n_trials; t = next.fetch_add(1))
                    run_trial(t);
            });
        for (auto& worker : workers) worker.join();
    }

    double total = 0.0;
    for (double eer : report.trial_eers) total += eer;
    report.mean_eer = total / config.n_trials;
    return report;
}

std::vector<FeatureSweepRow> sweep_feature_counts(const Dataset& data, EvalConfig config,
                                                  const std::vector<int>& d_values) {
    if (d_values.empty()) throw config_error("feature sweep needs at least one d value");
    for (int d : d_values)
        if (d < 1 || d > data.feature_count)
            throw config_error("sweep d = " + std::to_string(d) +
                               " outside [1, K=" + std::to_string(data.feature_count) + "]");
    std::vector<FeatureSweepRow> rows;
    for (int d : d_values) {
        config.enroll.selection.d = d;
        const ProtocolReport report = run_protocol(data, config);
        rows.push_back({d, report.mean_eer, report.trial_eers});
    }
    return rows;
}

ErrorCurve mean_curve(const std::vector<ErrorCurve>& curves) {
    if (curves.empty()) throw data_error("no curves to average");
    ErrorCurve mean = curves[0];
    for (std::size_t c = 1; c < curves.size(); ++c) {
        if (curves[c].points.size() != mean.points.size())
            throw data_error("curves disagree on the tau grid");
        for (std::size_t i = 0; i < mean.points.size(); ++i) {
            mean.points[i].far += curves[c].points[i].far;
            mean.points[i].frr += curves[c].points[i].frr;
        }
    }
    for (auto& point : mean.points) {
        point.far /= curves.size();
        point.frr /= curves.size();
    }
    return mean;
}

namespace {

nlohmann::json params_echo(const EvalConfig& config) {
    nlohmann::json params;
    params["d"] = config.enroll.selection.d;
    params["clusters"] = config.enroll.clusters;
    params["alpha"] = config.enroll.alpha;
    params["p"] = config.enroll.selection.p;
    params["k_c"] = config.enroll.selection.k_c;
    params["weighting"] = weighting_name(config.enroll.selection.weighting);
    params["fuzzifier"] = config.enroll.fuzzifier;
    params["tau_grid"] = {{"min", config.tau_min}, {"max", config.tau_max},
                          {"step", config.tau_step}};
    params["master_seed"] = config.master_seed;
    return params;
}

} // namespace

nlohmann::json report_to_json(const ProtocolReport& report) {
    nlohmann::json j;
    j["protocol"] = report.protocol;
    j["trials"] = report.trial_eers;
    j["mean_eer"] = report.mean_eer;
    j["params"] = params_echo(report.config);
    return j;
}

nlohmann::json sweep_to_json(const std::vector<FeatureSweepRow>& rows, const EvalConfig& config) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : rows)
        table.push_back({{"d", row.d}, {"mean_eer", row.mean_eer}, {"trials", row.trial_eers}});
    nlohmann::json j;
    j["protocol"] = protocol_name(config.protocol);
    j["rows"] = table;
    j["params"] = params_echo(config);
    return j;
}

void write_curve_csv(const ErrorCurve& curve, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << "tau,far,frr\n";
    for (const auto& point : curve.points)
        out << format_double(point.tau) << ',' << format_double(point.far) << ','
            << format_double(point.frr) << '\n';
    if (!out) throw io_error("write failed for " + path);
}

void write_sweep_csv(const std::vector<FeatureSweepRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << "d,mean_eer\n";
    for (const auto& row : rows)
        out << row.d << ',' << format_double(row.mean_eer) << '\n';
    if (!out) throw io_error("write failed for " + path);
}

} // namespace sigver
