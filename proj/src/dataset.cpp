#include "sigver/dataset.hpp"

#include "sigver/errors.hpp"
#include "sigver/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace sigver {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& text, int line_no) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw data_error("line " + std::to_string(line_no) + ": bad number '" + text + "'");
    if (!std::isfinite(v))
        throw data_error("line " + std::to_string(line_no) + ": non-finite value '" + text + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string feature_column_name(int index, int width) {
    std::string digits = std::to_string(index + 1);
    std::string name = "f";
    name.append(static_cast<std::size_t>(std::max(0, width - (int)digits.size())), '0');
    name += digits;
    return name;
}

int feature_name_width(int feature_count) {
    const int digits = (int)std::to_string(feature_count).size();
    return std::max(4, digits);
}

std::string label_name(Label label) {
    return label == Label::genuine ? "genuine" : "skilled_forgery";
}

Label parse_label(const std::string& text, int line_no) {
    if (text == "genuine") return Label::genuine;
    if (text == "skilled_forgery") return Label::skilled_forgery;
    throw data_error("line " + std::to_string(line_no) + ": unknown label '" + text + "'");
}

// Expect header `user_id,sample_id[,label],f...`; returns feature count.
int check_header(const std::vector<std::string>& fields, bool with_label,
                 const std::string& path) {
    const std::size_t fixed = with_label ? 3u : 2u;
    if (fields.size() < fixed + 1 || fields[0] != "user_id" || fields[1] != "sample_id" ||
        (with_label && fields[2] != "label"))
        throw data_error(path + ": header does not match the corpus CSV schema");
    for (std::size_t i = fixed; i < fields.size(); ++i)
        if (fields[i].empty() || fields[i][0] != 'f')
            throw data_error(path + ": feature column '" + fields[i] + "' must start with 'f'");
    return (int)(fields.size() - fixed);
}

} // namespace

std::vector<std::string> Dataset::users() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& s : samples)
        if (seen.insert(s.user_id).second) out.push_back(s.user_id);
    return out;
}

std::vector<int> Dataset::genuine_of(const std::string& user_id) const {
    std::vector<int> out;
    for (int i = 0; i < (int)samples.size(); ++i)
        if (samples[i].user_id == user_id && samples[i].label == Label::genuine)
            out.push_back(i);
    return out;
}

std::vector<int> Dataset::forgeries_of(const std::string& user_id) const {
    std::vector<int> out;
    for (int i = 0; i < (int)samples.size(); ++i)
        if (samples[i].user_id == user_id && samples[i].label == Label::skilled_forgery)
            out.push_back(i);
    return out;
}

Eigen::MatrixXd Dataset::matrix(const std::vector<int>& sample_indices) const {
    Eigen::MatrixXd X((int)sample_indices.size(), feature_count);
    for (int r = 0; r < (int)sample_indices.size(); ++r)
        X.row(r) = samples[(std::size_t)sample_indices[r]].features.transpose();
    return X;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw data_error(path + ": empty file");
    const int feature_count = check_header(split_csv_line(line), true, path);

    Dataset data;
    data.feature_count = feature_count;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if ((int)fields.size() != feature_count + 3)
            throw data_error("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(feature_count + 3) + " fields, got " +
                             std::to_string(fields.size()));
        Sample s;
        s.user_id = fields[0];
        int sid = 0;
        auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), sid);
        if (ec != std::errc() || p != fields[1].data() + fields[1].size() || sid < 0)
            throw data_error("line " + std::to_string(line_no) + ": bad sample_id '" + fields[1] + "'");
        s.sample_id = sid;
        s.label = parse_label(fields[2], line_no);
        s.features.resize(feature_count);
        for (int k = 0; k < feature_count; ++k)
            s.features[k] = parse_double(fields[3 + (std::size_t)k], line_no);
        data.samples.push_back(std::move(s));
    }
    if (data.samples.empty()) throw data_error(path + ": corpus has a header but no samples");
    return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    const int width = feature_name_width(data.feature_count);
    out << "user_id,sample_id,label";
    for (int k = 0; k < data.feature_count; ++k) out << ',' << feature_column_name(k, width);
    out << '\n';
    for (const auto& s : data.samples) {
        out << s.user_id << ',' << s.sample_id << ',' << label_name(s.label);
        for (int k = 0; k < data.feature_count; ++k) out << ',' << format_double(s.features[k]);
        out << '\n';
    }
    if (!out) throw io_error("write failed for " + path);
}

Sample load_single_sample(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw data_error(path + ": empty file");
    const int feature_count = check_header(split_csv_line(line), false, path);
    std::string row;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (!row.empty()) throw data_error(path + ": expected a single sample row");
        row = line;
    }
    if (row.empty()) throw data_error(path + ": no sample row");
    const auto fields = split_csv_line(row);
    if ((int)fields.size() != feature_count + 2)
        throw data_error(path + ": expected " + std::to_string(feature_count + 2) + " fields");
    Sample s;
    s.user_id = fields[0];
    int sid = 0;
    auto [p, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), sid);
    if (ec != std::errc() || p != fields[1].data() + fields[1].size() || sid < 0)
        throw data_error(path + ": bad sample_id '" + fields[1] + "'");
    s.sample_id = sid;
    s.features.resize(feature_count);
    for (int k = 0; k < feature_count; ++k)
        s.features[k] = parse_double(fields[2 + (std::size_t)k], line_no);
    return s;
}

namespace {

// Synthetic corpus design. Each user writes in a few recurring modes (think:
// hurried vs careful executions). Every feature tracks the modes: the planted
// discriminative features reproduce one mode-contrast pattern each, precisely
// (low spread), while the complement features echo weaker contrasts sloppily
// (high spread). A skilled forger mimics the modes but writes with extra
// tremor on the sloppy features and misses the precise ones by `separation`
// standard deviations.
constexpr double kUserMeanSpread = 10.0;   // per-feature user mean scale (x noise)
constexpr double kComplementSpread = 4.0;  // high-spread multiplier (x noise)
constexpr double kContrastGain = 2.0;      // mode-contrast amplitude on planted dims
constexpr double kPlantedJitter = 0.25;    // residual spread on planted dims
constexpr double kCloneGain = 0.9;         // contrast amplitude carried by complement dims
constexpr double kLadderTop = 1.45;        // contrast-strength ladder endpoints
constexpr double kLadderBottom = 0.7;
constexpr double kForgerSloppiness = 3.0;  // forger noise inflation on non-planted dims

// Orthogonal mode contrasts: real DFT harmonics over n_cells, unit RMS per
// row, ordered cos/sin by ascending frequency (Nyquist last when n is even).
// n_cells - 1 rows.
Eigen::MatrixXd mode_contrasts(int n_cells) {
    const int rows = n_cells - 1;
    Eigen::MatrixXd basis(rows, n_cells);
    int r = 0;
    for (int k = 1; 2 * k <= n_cells && r < rows; ++k) {
        for (int c = 0; c < n_cells; ++c)
            basis(r, c) = std::cos(2.0 * std::numbers::pi * k * c / n_cells);
        ++r;
        if (2 * k == n_cells) break;
        for (int c = 0; c < n_cells; ++c)
            basis(r, c) = std::sin(2.0 * std::numbers::pi * k * c / n_cells);
        ++r;
    }
    for (int i = 0; i < rows; ++i) {
        const double rms = std::sqrt(basis.row(i).squaredNorm() / n_cells);
        basis.row(i) /= rms;
    }
    return basis;
}

double ladder_strength(int j, int d_star) {
    if (d_star <= 1) return 1.0;
    const double t = (double)j / (double)(d_star - 1);
    return kLadderTop * std::pow(kLadderBottom / kLadderTop, t);
}

} // namespace

std::pair<Dataset, GroundTruth> generate_synthetic(const GeneratorConfig& config,
                                                   std::uint64_t seed) {
    if (config.n_users < 1 || config.genuine_per_user < 1 || config.forgery_per_user < 0)
        throw config_error("generator counts must be positive");
    if (config.feature_count < 1) throw config_error("feature_count must be positive");
    if (config.planted_count < 1 || config.planted_count > config.feature_count)
        throw config_error("planted_count must be in [1, feature_count]");
    if (config.noise <= 0.0) throw config_error("noise must be positive");
    if (config.separation < 0.0) throw config_error("separation must be non-negative");

    const int K = config.feature_count;
    const int d_star = config.planted_count;
    const int n_cells = d_star + 1;
    const Eigen::MatrixXd contrasts = mode_contrasts(n_cells);
    const double planted_sigma =
        config.noise * std::sqrt(kContrastGain * kContrastGain + kPlantedJitter * kPlantedJitter);

    const int id_width = std::max(2, (int)std::to_string(config.n_users).size());

    Dataset data;
    data.feature_count = K;
    GroundTruth truth;

    for (int u = 0; u < config.n_users; ++u) {
        Rng rng(Rng::mix(seed, (std::uint64_t)u));

        std::string user_id = "u";
        {
            std::string digits = std::to_string(u + 1);
            user_id.append((std::size_t)std::max(0, id_width - (int)digits.size()), '0');
            user_id += digits;
        }

        Eigen::VectorXd mu(K);
        for (int k = 0; k < K; ++k) mu[k] = rng.normal(0.0, kUserMeanSpread * config.noise);

        std::vector<int> planted = rng.sample_without_replacement(K, d_star);
        std::sort(planted.begin(), planted.end());
        std::vector<bool> is_planted(K, false);
        for (int k : planted) is_planted[k] = true;
        std::vector<int> complement;
        for (int k = 0; k < K; ++k)
            if (!is_planted[k]) complement.push_back(k);

        const std::vector<int> perm = rng.permutation(d_star);
        std::vector<double> forge_sign(d_star);
        for (auto& s : forge_sign) s = rng.next_double() < 0.5 ? -1.0 : 1.0;
        std::vector<double> clone_sign(complement.size());
        for (auto& s : clone_sign) s = rng.next_double() < 0.5 ? -1.0 : 1.0;

        auto draw_block = [&](int count, bool forged, int first_sample_id) {
            // a forger mimics the modes but executes them with extra tremor
            const double slop = forged ? kForgerSloppiness : 1.0;
            Eigen::MatrixXd X(count, K);
            for (std::size_t i = 0; i < complement.size(); ++i) {
                const int k = complement[i];
                const int j = (int)(i % (std::size_t)d_star);
                const double gain = kCloneGain * ladder_strength(j, d_star);
                for (int row = 0; row < count; ++row) {
                    const int cell = row % n_cells;
                    const double structure = clone_sign[i] * gain * contrasts(j, cell);
                    X(row, k) = mu[k] + kComplementSpread * config.noise *
                                            (structure + slop * rng.normal());
                }
            }
            for (int jj = 0; jj < d_star; ++jj) {
                const int k = planted[(std::size_t)jj];
                for (int row = 0; row < count; ++row) {
                    const int cell = row % n_cells;
                    X(row, k) = mu[k] + kContrastGain * config.noise * contrasts(perm[(std::size_t)jj], cell) +
                                kPlantedJitter * config.noise * rng.normal();
                }
            }
            if (forged)
                for (int jj = 0; jj < d_star; ++jj)
                    X.col(planted[(std::size_t)jj]).array() +=
                        forge_sign[(std::size_t)jj] * config.separation * planted_sigma;
            for (int row = 0; row < count; ++row) {
                Sample s;
                s.user_id = user_id;
                s.sample_id = first_sample_id + row;
                s.label = forged ? Label::skilled_forgery : Label::genuine;
                s.features = X.row(row).transpose();
                data.samples.push_back(std::move(s));
            }
        };

        draw_block(config.genuine_per_user, false, 0);
        if (config.forgery_per_user > 0)
            draw_block(config.forgery_per_user, true, config.genuine_per_user);

        truth.planted[user_id] = planted;
    }
    return {std::move(data), std::move(truth)};
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
    nlohmann::json users = nlohmann::json::object();
    for (const auto& [user_id, indices] : truth.planted) users[user_id] = indices;
    nlohmann::json doc;
    doc["users"] = users;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw io_error("write failed for " + path);
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path + ": " + e.what());
    }
    if (!doc.contains("users") || !doc["users"].is_object())
        throw data_error(path + ": missing 'users' object");
    GroundTruth truth;
    for (const auto& [user_id, indices] : doc["users"].items())
        truth.planted[user_id] = indices.get<std::vector<int>>();
    return truth;
}

Protocol parse_protocol(const std::string& name) {
    if (name == "skilled_05") return Protocol::skilled_05;
    if (name == "skilled_20") return Protocol::skilled_20;
    if (name == "random_05") return Protocol::random_05;
    if (name == "random_20") return Protocol::random_20;
    throw config_error("unknown protocol '" + name +
                       "' (expected skilled_05|skilled_20|random_05|random_20)");
}

std::string protocol_name(Protocol protocol) {
    switch (protocol) {
        case Protocol::skilled_05: return "skilled_05";
        case Protocol::skilled_20: return "skilled_20";
        case Protocol::random_05: return "random_05";
        case Protocol::random_20: return "random_20";
    }
    return "?";
}

int training_count(Protocol protocol) {
    return (protocol == Protocol::skilled_05 || protocol == Protocol::random_05) ? 5 : 20;
}

bool uses_random_forgeries(Protocol protocol) {
    return protocol == Protocol::random_05 || protocol == Protocol::random_20;
}

int default_feature_budget(Protocol protocol) {
    return training_count(protocol) == 5 ? 60 : 50;
}

TrialSplit make_trial_split(const Dataset& data, Protocol protocol,
                            std::uint64_t trial_seed) {
    TrialSplit split;
    split.protocol = protocol;
    split.trial_seed = trial_seed;

    const auto users = data.users();
    const int n_train = training_count(protocol);
    Rng rng(trial_seed);

    std::map<std::string, std::vector<int>> genuine_by_user;
    for (const auto& user : users) genuine_by_user[user] = data.genuine_of(user);

    for (const auto& user : users) {
        const auto& genuine = genuine_by_user[user];
        if ((int)genuine.size() < n_train)
            throw data_error("user " + user + " has " + std::to_string(genuine.size()) +
                             " genuine samples; protocol " + protocol_name(protocol) +
                             " needs " + std::to_string(n_train));
        const auto chosen = rng.sample_without_replacement((int)genuine.size(), n_train);
        std::vector<bool> in_train(genuine.size(), false);
        for (int c : chosen) in_train[(std::size_t)c] = true;
        auto& train = split.train[user];
        auto& test = split.test_genuine[user];
        for (std::size_t i = 0; i < genuine.size(); ++i)
            (in_train[i] ? train : test).push_back(genuine[i]);
    }

    if (uses_random_forgeries(protocol)) {
        for (const auto& target : users) {
            auto& forgeries = split.test_forgery[target];
            for (const auto& other : users) {
                if (other == target) continue;
                const auto& pool = genuine_by_user[other];
                forgeries.push_back(pool[rng.uniform_int(pool.size())]);
            }
        }
    } else {
        for (const auto& target : users) split.test_forgery[target] = data.forgeries_of(target);
    }
    return split;
}

} // namespace sigver
