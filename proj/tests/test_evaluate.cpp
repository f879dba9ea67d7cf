#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sigver/errors.hpp"
#include "sigver/evaluate.hpp"
#include "sigver/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace sigver;

namespace {

ErrorCurve curve_from(const std::vector<double>& taus, const std::vector<double>& fars,
                      const std::vector<double>& frrs) {
    ErrorCurve curve;
    for (std::size_t i = 0; i < taus.size(); ++i)
        curve.points.push_back({taus[i], fars[i], frrs[i]});
    return curve;
}

// three users, six genuines and two skilled forgeries each; forgeries sit a
// couple of sigmas off so acceptance counts spread over the whole range
Dataset miniature_corpus() {
    Dataset data;
    data.feature_count = 6;
    Rng rng(404);
    for (int u = 0; u < 3; ++u) {
        const std::string uid(1, char('a' + u));
        Eigen::VectorXd mean(6);
        for (int j = 0; j < 6; ++j) mean[j] = rng.normal(0.0, 5.0);
        for (int s = 0; s < 6; ++s) {
            Sample sample;
            sample.user_id = uid;
            sample.sample_id = s;
            sample.label = Label::genuine;
            sample.features.resize(6);
            for (int j = 0; j < 6; ++j) sample.features[j] = mean[j] + rng.normal(0.0, 1.0);
            data.samples.push_back(std::move(sample));
        }
        for (int s = 0; s < 2; ++s) {
            Sample sample;
            sample.user_id = uid;
            sample.sample_id = 6 + s;
            sample.label = Label::skilled_forgery;
            sample.features.resize(6);
            for (int j = 0; j < 6; ++j) {
                const double shift = (j % 2 == 0) ? 2.5 : 0.5;
                sample.features[j] = mean[j] + shift + rng.normal(0.0, 1.0);
            }
            data.samples.push_back(std::move(sample));
        }
    }
    return data;
}

GeneratorConfig small_synthetic() {
    GeneratorConfig config;
    config.n_users = 6;
    config.genuine_per_user = 8;
    config.forgery_per_user = 2;
    config.feature_count = 12;
    config.planted_count = 2;
    return config;
}

EvalConfig quick_eval(Protocol protocol, int trials) {
    EvalConfig config;
    config.protocol = protocol;
    config.n_trials = trials;
    config.enroll.selection.d = 4;
    config.enroll.selection.k_c = 3;
    config.enroll.clusters = 1;
    config.master_seed = 5;
    return config;
}

} // namespace

TEST_CASE("tau grid construction") {
    const auto grid = make_tau_grid(0.1, 0.9, 0.05);
    REQUIRE(grid.size() == 17);
    CHECK(grid.front() == doctest::Approx(0.1));
    CHECK(grid.back() == doctest::Approx(0.9));
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.05));

    CHECK(make_tau_grid(0.5, 0.5, 0.05).size() == 1);
    CHECK(make_tau_grid(0.0, 1.0, 0.5).size() == 3);

    CHECK_THROWS_AS((void)make_tau_grid(0.1, 0.9, 0.0), config_error);
    CHECK_THROWS_AS((void)make_tau_grid(0.1, 0.9, -0.1), config_error);
    CHECK_THROWS_AS((void)make_tau_grid(-0.1, 0.9, 0.05), config_error);
    CHECK_THROWS_AS((void)make_tau_grid(0.1, 1.1, 0.05), config_error);
    CHECK_THROWS_AS((void)make_tau_grid(0.9, 0.1, 0.05), config_error);
}

TEST_CASE("equal error rate on hand-built curves") {
    // exact FAR = FRR on the grid
    CHECK(compute_eer(curve_from({0.1, 0.5, 0.9}, {0.8, 0.4, 0.0}, {0.0, 0.4, 0.8})) ==
          doctest::Approx(0.4));
    // crossing between grid points: interpolation gives 0.35
    CHECK(compute_eer(curve_from({0.3, 0.7}, {0.6, 0.2}, {0.1, 0.5})) == doctest::Approx(0.35));
    // perfectly separable protocol
    CHECK(compute_eer(curve_from({0.1, 0.5, 0.9}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0})) ==
          doctest::Approx(0.0));
    // curves never cross: midpoint at the closest approach
    CHECK(compute_eer(curve_from({0.1, 0.5}, {0.5, 0.4}, {0.6, 0.9})) == doctest::Approx(0.55));
    // single point
    CHECK(compute_eer(curve_from({0.5}, {0.3}, {0.1})) == doctest::Approx(0.2));

    CHECK_THROWS_AS((void)compute_eer(ErrorCurve{}), data_error);
}

TEST_CASE("threshold sweep matches an exhaustive per-sample oracle") {
    const Dataset data = miniature_corpus();
    const TrialSplit split = make_trial_split(data, Protocol::skilled_05, 42);

    EnrollParams params;
    params.selection.d = 4;
    params.selection.k_c = 3;
    params.clusters = 1;

    std::map<std::string, UserModel> models;
    for (const std::string& user : data.users()) {
        const Eigen::MatrixXd train = data.matrix(split.train.at(user));
        models.emplace(user, enroll_user(user, train, params, Rng::mix(7, 1 + models.size())));
    }

    const std::vector<double> grid = {0.1, 0.3, 0.5, 0.7, 0.9};
    const ErrorCurve curve = sweep_thresholds(models, data, split, grid);
    REQUIRE(curve.points.size() == grid.size());

    for (std::size_t t = 0; t < grid.size(); ++t) {
        int genuine_total = 0, genuine_rejected = 0;
        for (const auto& [user, ids] : split.test_genuine)
            for (int idx : ids) {
                ++genuine_total;
                const auto result =
                    verify(data.samples[(std::size_t)idx].features, models.at(user), grid[t]);
                if (!result.accepted) ++genuine_rejected;
            }
        int forgery_total = 0, forgery_accepted = 0;
        for (const auto& [user, ids] : split.test_forgery)
            for (int idx : ids) {
                ++forgery_total;
                const auto result =
                    verify(data.samples[(std::size_t)idx].features, models.at(user), grid[t]);
                if (result.accepted) ++forgery_accepted;
            }
        CHECK(genuine_total == 3);
        CHECK(forgery_total == 6);
        CHECK(curve.points[t].tau == grid[t]);
        // same integers, same division: the match must be exact
        CHECK(curve.points[t].frr == (double)genuine_rejected / genuine_total);
        CHECK(curve.points[t].far == (double)forgery_accepted / forgery_total);
    }

    // thresholding is monotone in tau
    for (std::size_t t = 1; t < curve.points.size(); ++t) {
        CHECK(curve.points[t].far <= curve.points[t - 1].far);
        CHECK(curve.points[t].frr >= curve.points[t - 1].frr);
    }
}

TEST_CASE("degenerate thresholds accept or reject everything") {
    const Dataset data = miniature_corpus();
    const TrialSplit split = make_trial_split(data, Protocol::skilled_05, 9);
    EnrollParams params;
    params.selection.d = 4;
    params.selection.k_c = 3;
    params.clusters = 1;
    std::map<std::string, UserModel> models;
    for (const std::string& user : data.users())
        models.emplace(user, enroll_user(user, data.matrix(split.train.at(user)), params, 3));

    const ErrorCurve curve = sweep_thresholds(models, data, split, {0.0, 0.5, 1.0});
    CHECK(curve.points[0].far == 1.0); // tau 0 needs zero matches
    CHECK(curve.points[0].frr == 0.0);
}

TEST_CASE("a missing model is reported by user id") {
    const Dataset data = miniature_corpus();
    const TrialSplit split = make_trial_split(data, Protocol::skilled_05, 1);
    EnrollParams params;
    params.selection.d = 4;
    params.selection.k_c = 3;
    params.clusters = 1;
    std::map<std::string, UserModel> models;
    for (const std::string& user : data.users())
        models.emplace(user, enroll_user(user, data.matrix(split.train.at(user)), params, 3));
    models.erase("b");
    CHECK_THROWS_WITH_AS((void)sweep_thresholds(models, data, split, {0.5}),
                         "no model for user b", data_error);
}

TEST_CASE("protocol runs are deterministic and trial-count faithful") {
    const auto [data, truth] = generate_synthetic(small_synthetic(), 88);
    (void)truth;
    const EvalConfig config = quick_eval(Protocol::skilled_05, 3);

    const ProtocolReport a = run_protocol(data, config);
    const ProtocolReport b = run_protocol(data, config);
    CHECK(a.protocol == "skilled_05");
    REQUIRE(a.trial_eers.size() == 3);
    REQUIRE(a.trial_curves.size() == 3);
    CHECK(a.trial_eers == b.trial_eers);
    for (std::size_t t = 0; t < a.trial_curves.size(); ++t)
        for (std::size_t i = 0; i < a.trial_curves[t].points.size(); ++i) {
            CHECK(a.trial_curves[t].points[i].far == b.trial_curves[t].points[i].far);
            CHECK(a.trial_curves[t].points[i].frr == b.trial_curves[t].points[i].frr);
        }

    double total = 0.0;
    for (double eer : a.trial_eers) total += eer;
    CHECK(a.mean_eer == doctest::Approx(total / 3.0));

    EvalConfig single = config;
    single.n_trials = 1;
    const ProtocolReport one = run_protocol(data, single);
    REQUIRE(one.trial_eers.size() == 1);
    CHECK(one.mean_eer == one.trial_eers[0]);
    CHECK(one.trial_eers[0] == a.trial_eers[0]); // same master seed, same trial 0
}

TEST_CASE("worker count does not change the results") {
    const auto [data, truth] = generate_synthetic(small_synthetic(), 89);
    (void)truth;
    EvalConfig config = quick_eval(Protocol::random_05, 4);
    const ProtocolReport serial = run_protocol(data, config);
    config.jobs = 4;
    const ProtocolReport parallel = run_protocol(data, config);
    CHECK(serial.trial_eers == parallel.trial_eers);
    CHECK(serial.mean_eer == parallel.mean_eer);
}

TEST_CASE("different master seeds give different splits") {
    const auto [data, truth] = generate_synthetic(small_synthetic(), 90);
    (void)truth;
    EvalConfig config = quick_eval(Protocol::skilled_05, 2);
    const ProtocolReport a = run_protocol(data, config);
    config.master_seed = 6;
    const ProtocolReport c = run_protocol(data, config);
    bool any_difference = false;
    for (std::size_t t = 0; t < a.trial_curves.size() && !any_difference; ++t)
        for (std::size_t i = 0; i < a.trial_curves[t].points.size(); ++i)
            if (a.trial_curves[t].points[i].far != c.trial_curves[t].points[i].far ||
                a.trial_curves[t].points[i].frr != c.trial_curves[t].points[i].frr) {
                any_difference = true;
                break;
            }
    CHECK(any_difference);
}

TEST_CASE("feature sweep re-runs the protocol per budget") {
    const auto [data, truth] = generate_synthetic(small_synthetic(), 91);
    (void)truth;
    const EvalConfig config = quick_eval(Protocol::skilled_05, 2);
    const auto rows = sweep_feature_counts(data, config, {2, 4, 6});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].d == 2);
    CHECK(rows[1].d == 4);
    CHECK(rows[2].d == 6);
    for (const auto& row : rows) {
        CHECK(row.trial_eers.size() == 2);
        double total = 0.0;
        for (double eer : row.trial_eers) total += eer;
        CHECK(row.mean_eer == doctest::Approx(total / 2.0));
    }

    CHECK_THROWS_AS((void)sweep_feature_counts(data, config, {}), config_error);
    CHECK_THROWS_AS((void)sweep_feature_counts(data, config, {0}), config_error);
    CHECK_THROWS_AS((void)sweep_feature_counts(data, config, {13}), config_error);
}

TEST_CASE("starving the feature budget hurts the error rate") {
    const auto [data, truth] = generate_synthetic(GeneratorConfig{}, 1); // 5 planted features
    (void)truth;
    EvalConfig config;
    config.protocol = Protocol::skilled_20;
    config.n_trials = 6;
    config.enroll.clusters = 3;
    config.master_seed = 5;
    const auto rows = sweep_feature_counts(data, config, {2, 10});
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].mean_eer <= rows[0].mean_eer);
}

TEST_CASE("mean curve averages pointwise") {
    const ErrorCurve a = curve_from({0.1, 0.5}, {1.0, 0.0}, {0.0, 0.5});
    const ErrorCurve b = curve_from({0.1, 0.5}, {0.5, 0.5}, {0.5, 0.0});
    const ErrorCurve mean = mean_curve({a, b});
    REQUIRE(mean.points.size() == 2);
    CHECK(mean.points[0].far == doctest::Approx(0.75));
    CHECK(mean.points[0].frr == doctest::Approx(0.25));
    CHECK(mean.points[1].far == doctest::Approx(0.25));
    CHECK(mean.points[1].frr == doctest::Approx(0.25));

    CHECK_THROWS_AS((void)mean_curve({}), data_error);
    const ErrorCurve short_curve = curve_from({0.1}, {0.0}, {0.0});
    CHECK_THROWS_AS((void)mean_curve({a, short_curve}), data_error);
}

TEST_CASE("report serialization carries the parameter echo") {
    const auto [data, truth] = generate_synthetic(small_synthetic(), 92);
    (void)truth;
    const EvalConfig config = quick_eval(Protocol::skilled_05, 2);
    const ProtocolReport report = run_protocol(data, config);
    const nlohmann::json j = report_to_json(report);
    CHECK(j.at("protocol") == "skilled_05");
    CHECK(j.at("trials").size() == 2);
    CHECK(j.at("mean_eer").get<double>() == doctest::Approx(report.mean_eer));
    const auto& params = j.at("params");
    CHECK(params.at("d") == 4);
    CHECK(params.at("clusters") == 1);
    CHECK(params.at("alpha") == 2.0);
    CHECK(params.at("p") == 5);
    CHECK(params.at("k_c") == 3);
    CHECK(params.at("weighting") == "heat_kernel");
    CHECK(params.at("tau_grid").at("min") == 0.1);
    CHECK(params.at("tau_grid").at("max") == 0.9);
    CHECK(params.at("tau_grid").at("step") == 0.05);
    CHECK(params.at("master_seed") == 5);

    const auto rows = sweep_feature_counts(data, config, {2, 4});
    const nlohmann::json sweep = sweep_to_json(rows, config);
    CHECK(sweep.at("protocol") == "skilled_05");
    REQUIRE(sweep.at("rows").size() == 2);
    CHECK(sweep.at("rows").at(0).at("d") == 2);
    CHECK(sweep.at("rows").at(1).at("mean_eer").get<double>() == doctest::Approx(rows[1].mean_eer));
}

TEST_CASE("csv writers emit parseable tables") {
    const ErrorCurve curve = curve_from({0.1, 0.5}, {0.75, 0.25}, {0.0, 0.5});
    const std::string curve_path = "evaltest_curve.csv";
    write_curve_csv(curve, curve_path);
    {
        std::ifstream in(curve_path);
        REQUIRE(in.good());
        std::string line;
        std::getline(in, line);
        CHECK(line == "tau,far,frr");
        std::getline(in, line);
        CHECK(line == "0.1,0.75,0");
        std::getline(in, line);
        CHECK(line == "0.5,0.25,0.5");
    }
    std::remove(curve_path.c_str());

    const std::vector<FeatureSweepRow> rows = {{5, 0.125, {0.1, 0.15}}, {10, 0.5, {0.5, 0.5}}};
    const std::string sweep_path = "evaltest_sweep.csv";
    write_sweep_csv(rows, sweep_path);
    {
        std::ifstream in(sweep_path);
        REQUIRE(in.good());
        std::string line;
        std::getline(in, line);
        CHECK(line == "d,mean_eer");
        std::getline(in, line);
        CHECK(line == "5,0.125");
        std::getline(in, line);
        CHECK(line == "10,0.5");
    }
    std::remove(sweep_path.c_str());

    CHECK_THROWS_AS(write_curve_csv(curve, "no_such_dir/x.csv"), io_error);
}
