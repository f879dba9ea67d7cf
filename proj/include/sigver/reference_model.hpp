#pragma once

#include "sigver/feature_select.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sigver {

// One cluster summarized per feature by [mean - alpha*sigma, mean + alpha*sigma]
// (population sigma).
struct ReferenceInterval {
    int cluster_id = 0;
    int member_count = 0;
    std::vector<std::pair<double, double>> intervals;
};

struct UserModel {
    std::string user_id;
    std::vector<int> selected_indices;
    Normalization normalization;
    double alpha = 2.0;
    double tau = 0.5;
    std::vector<ReferenceInterval> references; // one per non-empty cluster
};

struct EnrollParams {
    SelectionParams selection;
    int clusters = 0; // 0 = auto: 3 when the training count >= 15, else 1
    double fuzzifier = 2.0;
    double fcm_tol = 1e-6;
    int fcm_max_iter = 300;
    double alpha = 2.0;
    double tau = 0.5;
};

struct VerificationResult {
    int acceptance_count = 0; // best A_c over the user's references
    int best_cluster = 0;
    std::vector<int> per_cluster_counts;
    bool accepted = false;
    double tau_used = 0.0;
};

ReferenceInterval build_reference(const Eigen::MatrixXd& cluster_samples, double alpha,
                                  int cluster_id = 0);

// Count of features inside their interval, boundaries inclusive.
int acceptance_count(const Eigen::VectorXd& test_projected, const ReferenceInterval& reference);

// Accept when A_c >= ceil(tau * d); the epsilon guards exact products like
// 0.3 * 10 landing on the wrong side of ceil.
int required_count(double tau, int d);

// Standardize on the training set, select features, cluster the projected
// training set, and summarize every non-empty cluster as intervals.
UserModel enroll_user(const std::string& user_id, const Eigen::MatrixXd& train,
                      const EnrollParams& params, std::uint64_t seed);

// Standardizes with the stored normalization, projects onto the stored
// indices, and takes the best acceptance count over the references.
VerificationResult verify(const Eigen::VectorXd& test_features, const UserModel& model,
                          std::optional<double> tau_override = std::nullopt);

int effective_cluster_count(int requested, int training_count);

} // namespace sigver
