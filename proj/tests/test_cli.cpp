#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sigver/cli.hpp"
#include "sigver/dataset.hpp"
#include "sigver/knowledgebase.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace sigver;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("sigver");
    for (const auto& arg : args) argv.push_back(arg.c_str());
    std::ostringstream captured_out, captured_err;
    auto* old_out = std::cout.rdbuf(captured_out.rdbuf());
    auto* old_err = std::cerr.rdbuf(captured_err.rdbuf());
    CliResult result;
    result.code = run_cli((int)argv.size(), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    result.out = captured_out.str();
    result.err = captured_err.str();
    return result;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// mean of a user's genuine samples, written in the single-sample schema
void write_probe(const Dataset& data, const std::string& user, double offset,
                 const std::string& path) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(data.feature_count);
    int count = 0;
    for (const auto& sample : data.samples)
        if (sample.user_id == user && sample.label == Label::genuine) {
            mean += sample.features;
            ++count;
        }
    REQUIRE(count > 0);
    mean /= count;
    mean.array() += offset;

    std::ofstream out(path);
    REQUIRE(out.good());
    out << "user_id,sample_id";
    for (int j = 1; j <= data.feature_count; ++j)
        out << ",f" << std::setw(4) << std::setfill('0') << j;
    out << "\nprobe,0";
    out << std::setprecision(17);
    for (int j = 0; j < data.feature_count; ++j) out << ',' << mean[j];
    out << '\n';
}

struct TempFiles {
    std::vector<std::string> paths;
    std::string track(const std::string& path) {
        paths.push_back(path);
        return path;
    }
    ~TempFiles() {
        for (const auto& path : paths) std::remove(path.c_str());
    }
};

} // namespace

TEST_CASE("generate, enroll, verify round trip") {
    TempFiles tmp;
    const std::string corpus = tmp.track("clitest_corpus.csv");
    tmp.track(corpus + ".truth.json");
    const std::string kb_path = tmp.track("clitest_kb.json");
    const std::string accept_probe = tmp.track("clitest_accept.csv");
    const std::string reject_probe = tmp.track("clitest_reject.csv");

    const CliResult gen = run({"gendata", "--users", "3", "--genuine", "20", "--forgery", "2",
                               "--features", "8", "--planted", "2", "--seed", "3", "--out",
                               corpus});
    REQUIRE(gen.code == 0);
    CHECK(contains(gen.out, "wrote 66 samples for 3 users"));
    CHECK(json::parse(slurp(corpus + ".truth.json")).contains("users"));

    const CliResult enroll = run({"enroll", "--data", corpus, "--protocol", "skilled_20", "--d",
                                  "4", "--clusters", "1", "--out", kb_path, "--fixed-time"});
    REQUIRE(enroll.code == 0);
    CHECK(contains(enroll.out, "enrolled 3 users"));

    const Knowledgebase kb = load_knowledgebase(kb_path);
    REQUIRE(kb.models.size() == 3);
    CHECK(kb.created == "1970-01-01T00:00:00Z");
    CHECK(kb.config.at("d") == 4);
    CHECK(kb.config.at("protocol") == "skilled_20");
    CHECK(kb.config.at("seed") == 1);

    // the training mean must verify against its own model
    const Dataset data = load_dataset(corpus);
    write_probe(data, "u01", 0.0, accept_probe);
    const CliResult ok =
        run({"verify", "--kb", kb_path, "--user", "u01", "--sample", accept_probe});
    REQUIRE(ok.code == 0);
    CHECK(ok.out == "A_c=4 d=4 tau=0.5 decision=ACCEPT\n");

    // a grossly displaced probe must not
    write_probe(data, "u01", 1000.0, reject_probe);
    const CliResult bad =
        run({"verify", "--kb", kb_path, "--user", "u01", "--sample", reject_probe});
    REQUIRE(bad.code == 0); // a rejection is a result, not an error
    CHECK(contains(bad.out, "A_c=0"));
    CHECK(contains(bad.out, "decision=REJECT"));

    // tau override is reflected in the output
    const CliResult strict = run(
        {"verify", "--kb", kb_path, "--user", "u01", "--sample", accept_probe, "--tau", "0.9"});
    REQUIRE(strict.code == 0);
    CHECK(contains(strict.out, "tau=0.9"));
    CHECK(contains(strict.out, "decision=ACCEPT")); // A_c = 4 = d

    // unknown user is a data error
    const CliResult nobody =
        run({"verify", "--kb", kb_path, "--user", "zz", "--sample", accept_probe});
    CHECK(nobody.code == 1);
    CHECK(contains(nobody.err, "no model for user zz"));
}

TEST_CASE("enrollment is byte-identical under --fixed-time") {
    TempFiles tmp;
    const std::string corpus = tmp.track("clitest_det_corpus.csv");
    tmp.track(corpus + ".truth.json");
    const std::string kb_a = tmp.track("clitest_det_a.json");
    const std::string kb_b = tmp.track("clitest_det_b.json");

    REQUIRE(run({"gendata", "--users", "2", "--genuine", "8", "--forgery", "2", "--features",
                 "6", "--planted", "2", "--seed", "11", "--out", corpus})
                .code == 0);
    const std::vector<std::string> enroll_args = {
        "enroll", "--data", corpus,   "--protocol", "skilled_05", "--d",
        "3",      "--seed", "5",      "--out",      kb_a,         "--fixed-time"};
    REQUIRE(run(enroll_args).code == 0);
    std::vector<std::string> again = enroll_args;
    again[10] = kb_b;
    REQUIRE(run(again).code == 0);
    CHECK(slurp(kb_a) == slurp(kb_b));
}

TEST_CASE("gendata is deterministic and seed-sensitive") {
    TempFiles tmp;
    const std::string a = tmp.track("clitest_gen_a.csv");
    tmp.track(a + ".truth.json");
    const std::string b = tmp.track("clitest_gen_b.csv");
    tmp.track(b + ".truth.json");
    const std::string c = tmp.track("clitest_gen_c.csv");
    tmp.track(c + ".truth.json");

    REQUIRE(run({"gendata", "--users", "2", "--genuine", "5", "--forgery", "2", "--features",
                 "6", "--planted", "2", "--seed", "9", "--out", a})
                .code == 0);
    REQUIRE(run({"gendata", "--users", "2", "--genuine", "5", "--forgery", "2", "--features",
                 "6", "--planted", "2", "--seed", "9", "--out", b})
                .code == 0);
    REQUIRE(run({"gendata", "--users", "2", "--genuine", "5", "--forgery", "2", "--features",
                 "6", "--planted", "2", "--seed", "10", "--out", c})
                .code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("evaluate writes a report and a mean curve") {
    TempFiles tmp;
    const std::string corpus = tmp.track("clitest_eval_corpus.csv");
    tmp.track(corpus + ".truth.json");
    const std::string report = tmp.track("clitest_report.json");
    const std::string curves = tmp.track("clitest_curves.csv");

    REQUIRE(run({"gendata", "--users", "3", "--genuine", "8", "--forgery", "2", "--features",
                 "8", "--planted", "2", "--seed", "13", "--out", corpus})
                .code == 0);
    const CliResult eval = run({"evaluate", "--data", corpus, "--protocol", "skilled_05", "--d",
                                "4", "--clusters", "1", "--trials", "2", "--seed", "3",
                                "--report", report, "--curves", curves, "--fixed-time"});
    REQUIRE(eval.code == 0);
    CHECK(contains(eval.out, "protocol=skilled_05 trials=2 mean_eer="));

    const json doc = json::parse(slurp(report));
    CHECK(doc.at("protocol") == "skilled_05");
    CHECK(doc.at("trials").size() == 2);
    CHECK(doc.at("created") == "1970-01-01T00:00:00Z");
    CHECK(doc.at("params").at("d") == 4);
    CHECK(doc.at("params").at("tau_grid").at("step") == 0.05);
    CHECK(doc.at("mean_eer").is_number());

    std::istringstream curve_text(slurp(curves));
    std::string line;
    std::getline(curve_text, line);
    CHECK(line == "tau,far,frr");
    int rows = 0;
    while (std::getline(curve_text, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 17);

    // byte-identical on a repeat run
    const std::string report_b = tmp.track("clitest_report_b.json");
    const CliResult again = run({"evaluate", "--data", corpus, "--protocol", "skilled_05", "--d",
                                 "4", "--clusters", "1", "--trials", "2", "--seed", "3",
                                 "--report", report_b, "--fixed-time"});
    REQUIRE(again.code == 0);
    CHECK(slurp(report) == slurp(report_b));
    CHECK(eval.out == again.out);
}

TEST_CASE("sweep emits one row per feature budget") {
    TempFiles tmp;
    const std::string corpus = tmp.track("clitest_sweep_corpus.csv");
    tmp.track(corpus + ".truth.json");
    const std::string report = tmp.track("clitest_sweep.json");
    const std::string table = tmp.track("clitest_sweep.csv");

    REQUIRE(run({"gendata", "--users", "3", "--genuine", "8", "--forgery", "2", "--features",
                 "8", "--planted", "2", "--seed", "13", "--out", corpus})
                .code == 0);
    const CliResult sweep = run({"sweep", "--data", corpus, "--protocol", "skilled_05",
                                 "--d-list", "2,4", "--clusters", "1", "--trials", "1", "--seed",
                                 "3", "--report", report, "--csv", table, "--fixed-time"});
    REQUIRE(sweep.code == 0);
    CHECK(contains(sweep.out, "d=2 mean_eer="));
    CHECK(contains(sweep.out, "d=4 mean_eer="));

    const json doc = json::parse(slurp(report));
    REQUIRE(doc.at("rows").size() == 2);
    CHECK(doc.at("rows").at(0).at("d") == 2);
    CHECK(doc.at("rows").at(1).at("d") == 4);

    std::istringstream table_text(slurp(table));
    std::string line;
    std::getline(table_text, line);
    CHECK(line == "d,mean_eer");
    std::getline(table_text, line);
    CHECK(line.rfind("2,", 0) == 0);
    std::getline(table_text, line);
    CHECK(line.rfind("4,", 0) == 0);
}

TEST_CASE("a json config file supplies defaults the command line overrides") {
    TempFiles tmp;
    const std::string corpus = tmp.track("clitest_cfg_corpus.csv");
    tmp.track(corpus + ".truth.json");
    const std::string config = tmp.track("clitest_cfg.json");
    const std::string kb_path = tmp.track("clitest_cfg_kb.json");

    REQUIRE(run({"gendata", "--users", "2", "--genuine", "8", "--forgery", "2", "--features",
                 "6", "--planted", "2", "--seed", "21", "--out", corpus})
                .code == 0);

    std::ofstream(config) << R"({"d": 3, "alpha": 1.5, "protocol": "skilled_05"})" << '\n';
    const CliResult enroll = run({"enroll", "--data", corpus, "--out", kb_path, "--fixed-time",
                                  "--config", config});
    REQUIRE(enroll.code == 0);
    Knowledgebase kb = load_knowledgebase(kb_path);
    CHECK(kb.config.at("d") == 3);
    CHECK(kb.config.at("alpha") == 1.5);
    CHECK(kb.config.at("protocol") == "skilled_05");

    // explicit flags beat the config file
    const CliResult enroll_override = run({"enroll", "--data", corpus, "--out", kb_path, "--d",
                                           "2", "--fixed-time", "--config", config});
    REQUIRE(enroll_override.code == 0);
    kb = load_knowledgebase(kb_path);
    CHECK(kb.config.at("d") == 2);
    CHECK(kb.config.at("alpha") == 1.5);

    // broken config is a usage error
    std::ofstream(config) << "not json at all {";
    const CliResult broken = run({"enroll", "--data", corpus, "--out", kb_path, "--config",
                                  config});
    CHECK(broken.code == 2);
}

TEST_CASE("usage errors exit 2, domain errors exit 1") {
    TempFiles tmp;

    CHECK(run({}).code == 2);                         // a subcommand is required
    CHECK(run({"gendata"}).code == 2);                // --out is required
    CHECK(run({"gendata", "--nope", "x"}).code == 2); // unknown option
    CHECK(run({"frobnicate"}).code == 2);             // unknown subcommand
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"gendata", "--help"}).code == 0);

    // domain failures after a clean parse
    CHECK(run({"enroll", "--data", "clitest_missing.csv", "--out", "clitest_x.json"}).code == 1);
    CHECK(run({"gendata", "--users", "0", "--out", tmp.track("clitest_zero.csv")}).code == 1);
    CHECK(run({"gendata", "--out", "clitest_no_dir/x.csv"}).code == 1);

    const std::string corpus = tmp.track("clitest_err_corpus.csv");
    tmp.track(corpus + ".truth.json");
    REQUIRE(run({"gendata", "--users", "2", "--genuine", "8", "--forgery", "2", "--features",
                 "6", "--planted", "2", "--seed", "2", "--out", corpus})
                .code == 0);
    const CliResult bad_protocol = run({"evaluate", "--data", corpus, "--protocol", "nope"});
    CHECK(bad_protocol.code == 1);
    CHECK(contains(bad_protocol.err, "error:"));
}
