#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sigver {

enum class Label { genuine, skilled_forgery };

struct Sample {
    std::string user_id;
    int sample_id = 0;
    Label label = Label::genuine;
    Eigen::VectorXd features;
};

struct Dataset {
    std::vector<Sample> samples;
    int feature_count = 0;

    // Distinct user ids in first-appearance order.
    std::vector<std::string> users() const;
    // Indices into samples, in file order.
    std::vector<int> genuine_of(const std::string& user_id) const;
    std::vector<int> forgeries_of(const std::string& user_id) const;
    // Rows = the given sample indices, projected onto all K features.
    Eigen::MatrixXd matrix(const std::vector<int>& sample_indices) const;
};

struct GeneratorConfig {
    int n_users = 20;
    int genuine_per_user = 30;
    int forgery_per_user = 30;
    int feature_count = 50;
    int planted_count = 5;
    double separation = 4.0;
    double noise = 1.0;
};

// Per-user planted discriminative feature indices (ascending).
struct GroundTruth {
    std::map<std::string, std::vector<int>> planted;
};

// CSV schema: header `user_id,sample_id,label,f0001,...`; label is
// genuine|skilled_forgery; features are decimal literals.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

// Single test signature: same schema minus the label column, one data row.
Sample load_single_sample(const std::string& path);

std::pair<Dataset, GroundTruth> generate_synthetic(const GeneratorConfig& config,
                                                   std::uint64_t seed);

// Sidecar schema: {"users": {"<user_id>": [indices...]}}
void save_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);

enum class Protocol { skilled_05, skilled_20, random_05, random_20 };

Protocol parse_protocol(const std::string& name);
std::string protocol_name(Protocol protocol);
int training_count(Protocol protocol);
bool uses_random_forgeries(Protocol protocol);
// d defaults mirror the evaluation setup: 60 for *_05, 50 for *_20.
int default_feature_budget(Protocol protocol);

struct TrialSplit {
    Protocol protocol;
    std::uint64_t trial_seed = 0;
    // Values are indices into Dataset::samples.
    std::map<std::string, std::vector<int>> train;
    std::map<std::string, std::vector<int>> test_genuine;
    std::map<std::string, std::vector<int>> test_forgery;
};

// Training samples drawn uniformly without replacement per user; remaining
// genuines become test_genuine. Skilled protocols test against all of the
// user's skilled forgeries; random protocols against one genuine sample drawn
// from each other user.
TrialSplit make_trial_split(const Dataset& data, Protocol protocol,
                            std::uint64_t trial_seed);

} // namespace sigver
