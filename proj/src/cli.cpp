#include "sigver/cli.hpp"

#include "sigver/dataset.hpp"
#include "sigver/errors.hpp"
#include "sigver/evaluate.hpp"
#include "sigver/knowledgebase.hpp"
#include "sigver/reference_model.hpp"
#include "sigver/rng.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace sigver {

namespace {

using nlohmann::json;

// Flat JSON config files: {"option-name": value}; values fill options that
// were not given on the command line.
std::string config_scalar(const std::string& path, const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number()) return value.dump();
    throw CLI::FileError(path + ": config values must be scalars or arrays of scalars");
}

void apply_json_config(CLI::App* cmd) {
    if (cmd->count("--config") == 0) return;
    const auto path = cmd->get_option("--config")->as<std::string>();
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw CLI::FileError(path + ": not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw CLI::FileError(path + ": config root must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt) throw CLI::FileError(path + ": no such option --" + key);
        if (opt->count() > 0) continue; // explicit flags win
        if (value.is_array()) {
            for (const auto& element : value) opt->add_result(config_scalar(path, element));
        } else {
            opt->add_result(config_scalar(path, value));
        }
        opt->run_callback();
    }
}

std::string timestamp_utc(bool fixed_time) {
    if (fixed_time) return "1970-01-01T00:00:00Z";
    std::time_t now = std::time(nullptr);
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buf;
}

void write_json_file(const json& doc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw io_error("write failed for " + path);
}

struct PipelineFlags {
    int d = 0; // 0 = protocol default
    int clusters = 0;
    double alpha = 2.0;
    int p = 5;
    int k_c = 5;
    std::string weighting = "heat_kernel";
    double heat_sigma = 0.0;
    double fuzzifier = 2.0;
    double tau = 0.5;

    void add_to(CLI::App* cmd, bool with_tau) {
        cmd->add_option("--d", d, "features kept per user (default: 60 for *_05, 50 for *_20)");
        cmd->add_option("--clusters", clusters,
                        "reference clusters per user (0 = 3 when training count >= 15, else 1)");
        cmd->add_option("--alpha", alpha, "interval half-width in standard deviations");
        cmd->add_option("--p", p, "kNN neighbour count for the affinity graph");
        cmd->add_option("--kc", k_c, "spectral embedding width");
        cmd->add_option("--weighting", weighting, "edge weights: binary|heat_kernel|dot_product");
        cmd->add_option("--heat-sigma", heat_sigma, "heat kernel width (<= 0 self-tunes)");
        cmd->add_option("--fuzzifier", fuzzifier, "FCM fuzzifier m");
        if (with_tau) cmd->add_option("--tau", tau, "decision threshold stored with each model");
    }

    EnrollParams enroll_params(Protocol protocol, int feature_count) const {
        EnrollParams params;
        params.selection.p = p;
        params.selection.weighting = parse_weighting(weighting);
        params.selection.heat_sigma = heat_sigma;
        params.selection.k_c = k_c;
        int budget = d > 0 ? d : default_feature_budget(protocol);
        if (budget > feature_count) budget = feature_count; // corpus smaller than the default
        params.selection.d = budget;
        params.clusters = clusters;
        params.fuzzifier = fuzzifier;
        params.alpha = alpha;
        params.tau = tau;
        return params;
    }

    json echo(Protocol protocol, int feature_count) const {
        const EnrollParams params = enroll_params(protocol, feature_count);
        json j;
        j["protocol"] = protocol_name(protocol);
        j["d"] = params.selection.d;
        j["clusters"] = params.clusters;
        j["alpha"] = params.alpha;
        j["p"] = params.selection.p;
        j["k_c"] = params.selection.k_c;
        j["weighting"] = weighting_name(params.selection.weighting);
        j["fuzzifier"] = params.fuzzifier;
        j["tau"] = params.tau;
        return j;
    }
};

void use_json_config(CLI::App* cmd) {
    cmd->add_option("--config")->description(
        "JSON file with defaults for any option of this command");
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"writer-dependent online signature verification toolkit"};
    app.require_subcommand(1);

    // ---- gendata ----
    auto* gendata = app.add_subcommand("gendata", "generate a synthetic corpus with planted "
                                                  "discriminative features");
    GeneratorConfig gen;
    std::uint64_t gen_seed = 7;
    std::string gen_out;
    gendata->add_option("--users", gen.n_users, "number of users");
    gendata->add_option("--genuine", gen.genuine_per_user, "genuine signatures per user");
    gendata->add_option("--forgery", gen.forgery_per_user, "skilled forgeries per user");
    gendata->add_option("--features", gen.feature_count, "feature vector length K");
    gendata->add_option("--planted", gen.planted_count, "discriminative features per user");
    gendata->add_option("--separation", gen.separation, "forgery displacement in SDs");
    gendata->add_option("--noise", gen.noise, "base noise scale");
    gendata->add_option("--seed", gen_seed, "generator seed");
    gendata->add_option("--out", gen_out, "corpus CSV path")->required();
    use_json_config(gendata);

    // ---- enroll ----
    auto* enroll = app.add_subcommand("enroll", "build a knowledgebase from a corpus");
    std::string enroll_data, enroll_protocol = "skilled_20", enroll_out;
    std::uint64_t enroll_seed = 1;
    bool enroll_fixed_time = false;
    PipelineFlags enroll_flags;
    enroll->add_option("--data", enroll_data, "corpus CSV")->required();
    enroll->add_option("--protocol", enroll_protocol,
                       "skilled_05|skilled_20|random_05|random_20 (sets the training count)");
    enroll_flags.add_to(enroll, true);
    enroll->add_option("--seed", enroll_seed, "training-subset and clustering seed");
    enroll->add_option("--out", enroll_out, "knowledgebase JSON path")->required();
    enroll->add_flag("--fixed-time", enroll_fixed_time, "pin the created timestamp");
    use_json_config(enroll);

    // ---- verify ----
    auto* verify_cmd = app.add_subcommand("verify", "verify one signature against a model");
    std::string verify_kb, verify_user, verify_sample;
    double verify_tau = -1.0;
    verify_cmd->add_option("--kb", verify_kb, "knowledgebase JSON")->required();
    verify_cmd->add_option("--user", verify_user, "claimed user id")->required();
    verify_cmd->add_option("--sample", verify_sample,
                           "single-sample CSV (corpus schema without the label column)")
        ->required();
    verify_cmd->add_option("--tau", verify_tau, "decision threshold (default: stored with model)");
    use_json_config(verify_cmd);

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "run a protocol over randomized trials and "
                                                    "report FAR/FRR/EER");
    std::string eval_data, eval_protocol = "skilled_20", eval_report, eval_curves;
    EvalConfig eval_config;
    PipelineFlags eval_flags;
    int eval_trials = 20;
    int eval_jobs = 1;
    std::uint64_t eval_seed = 1;
    bool eval_fixed_time = false;
    evaluate->add_option("--data", eval_data, "corpus CSV")->required();
    evaluate->add_option("--protocol", eval_protocol, "skilled_05|skilled_20|random_05|random_20");
    eval_flags.add_to(evaluate, false);
    evaluate->add_option("--trials", eval_trials, "number of randomized trials");
    evaluate->add_option("--tau-min", eval_config.tau_min, "threshold grid start");
    evaluate->add_option("--tau-max", eval_config.tau_max, "threshold grid end");
    evaluate->add_option("--tau-step", eval_config.tau_step, "threshold grid step");
    evaluate->add_option("--seed", eval_seed, "master seed");
    evaluate->add_option("--jobs", eval_jobs, "parallel trial workers");
    evaluate->add_option("--report", eval_report, "report JSON path");
    evaluate->add_option("--curves", eval_curves, "mean FAR/FRR curve CSV path");
    evaluate->add_flag("--fixed-time", eval_fixed_time, "pin the created timestamp");
    use_json_config(evaluate);

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "evaluate across feature budgets d");
    std::string sweep_data, sweep_protocol = "skilled_20", sweep_report, sweep_csv;
    std::vector<int> sweep_d_values;
    PipelineFlags sweep_flags;
    int sweep_trials = 20;
    int sweep_jobs = 1;
    std::uint64_t sweep_seed = 1;
    bool sweep_fixed_time = false;
    sweep->add_option("--data", sweep_data, "corpus CSV")->required();
    sweep->add_option("--protocol", sweep_protocol, "skilled_05|skilled_20|random_05|random_20");
    sweep->add_option("--d-list", sweep_d_values, "comma-separated feature budgets")
        ->delimiter(',');
    sweep_flags.add_to(sweep, false);
    sweep->add_option("--trials", sweep_trials, "number of randomized trials per d");
    sweep->add_option("--seed", sweep_seed, "master seed");
    sweep->add_option("--jobs", sweep_jobs, "parallel trial workers");
    sweep->add_option("--report", sweep_report, "report JSON path");
    sweep->add_option("--csv", sweep_csv, "d,mean_eer table CSV path");
    sweep->add_flag("--fixed-time", sweep_fixed_time, "pin the created timestamp");
    use_json_config(sweep);

    try {
        app.parse(argc, argv);
        for (CLI::App* cmd : app.get_subcommands()) apply_json_config(cmd);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(gendata)) {
            auto [data, truth] = generate_synthetic(gen, gen_seed);
            save_dataset(data, gen_out);
            save_ground_truth(truth, gen_out + ".truth.json");
            std::cout << "wrote " << data.samples.size() << " samples for " << gen.n_users
                      << " users to " << gen_out << '\n';
        } else if (app.got_subcommand(enroll)) {
            const Protocol protocol = parse_protocol(enroll_protocol);
            const Dataset data = load_dataset(enroll_data);
            const EnrollParams params = enroll_flags.enroll_params(protocol, data.feature_count);
            const TrialSplit split = make_trial_split(data, protocol, enroll_seed);
            Knowledgebase kb;
            kb.created = timestamp_utc(enroll_fixed_time);
            kb.config = enroll_flags.echo(protocol, data.feature_count);
            kb.config["seed"] = enroll_seed;
            const auto users = data.users();
            for (std::size_t u = 0; u < users.size(); ++u) {
                const Eigen::MatrixXd train = data.matrix(split.train.at(users[u]));
                kb.models.push_back(enroll_user(users[u], train, params,
                                                Rng::mix(enroll_seed, (std::uint64_t)u + 1)));
            }
            save_knowledgebase(kb, enroll_out);
            std::cout << "enrolled " << kb.models.size() << " users to " << enroll_out << '\n';
        } else if (app.got_subcommand(verify_cmd)) {
            const Knowledgebase kb = load_knowledgebase(verify_kb);
            const UserModel* model = kb.find(verify_user);
            if (!model) throw data_error("no model for user " + verify_user + " in " + verify_kb);
            const Sample sample = load_single_sample(verify_sample);
            std::optional<double> tau;
            if (verify_tau >= 0.0) tau = verify_tau;
            const VerificationResult result = verify(sample.features, *model, tau);
            std::cout << "A_c=" << result.acceptance_count
                      << " d=" << model->selected_indices.size() << " tau=" << result.tau_used
                      << " decision=" << (result.accepted ? "ACCEPT" : "REJECT") << '\n';
        } else if (app.got_subcommand(evaluate)) {
            eval_config.protocol = parse_protocol(eval_protocol);
            const Dataset data = load_dataset(eval_data);
            eval_config.enroll = eval_flags.enroll_params(eval_config.protocol, data.feature_count);
            eval_config.n_trials = eval_trials;
            eval_config.master_seed = eval_seed;
            eval_config.jobs = eval_jobs;
            const ProtocolReport report = run_protocol(data, eval_config);
            std::cout << "protocol=" << report.protocol << " trials=" << eval_trials
                      << " mean_eer=" << report.mean_eer << '\n';
            if (!eval_report.empty()) {
                json doc = report_to_json(report);
                doc["created"] = timestamp_utc(eval_fixed_time);
                write_json_file(doc, eval_report);
            }
            if (!eval_curves.empty()) write_curve_csv(mean_curve(report.trial_curves), eval_curves);
        } else if (app.got_subcommand(sweep)) {
            EvalConfig config;
            config.protocol = parse_protocol(sweep_protocol);
            const Dataset data = load_dataset(sweep_data);
            config.enroll = sweep_flags.enroll_params(config.protocol, data.feature_count);
            config.n_trials = sweep_trials;
            config.master_seed = sweep_seed;
            config.jobs = sweep_jobs;
            std::vector<int> d_values = sweep_d_values;
            if (d_values.empty())
                for (int d = 5; d <= std::min(75, data.feature_count); d += 5)
                    d_values.push_back(d);
            const auto rows = sweep_feature_counts(data, config, d_values);
            for (const auto& row : rows)
                std::cout << "d=" << row.d << " mean_eer=" << row.mean_eer << '\n';
            if (!sweep_report.empty()) {
                json doc = sweep_to_json(rows, config);
                doc["created"] = timestamp_utc(sweep_fixed_time);
                write_json_file(doc, sweep_report);
            }
            if (!sweep_csv.empty()) write_sweep_csv(rows, sweep_csv);
        }
    } catch (const CLI::Error& e) {
        // config-file problems discovered at use time
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace sigver
