#include "sigver/reference_model.hpp"

#include "sigver/errors.hpp"
#include "sigver/fuzzy_cmeans.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sigver {

ReferenceInterval build_reference(const Eigen::MatrixXd& cluster_samples, double alpha,
                                  int cluster_id) {
    const int n = (int)cluster_samples.rows();
    if (n < 1) throw data_error("cannot build a reference from an empty cluster");
    if (alpha < 0.0) throw config_error("alpha must be >= 0");

    ReferenceInterval ref;
    ref.cluster_id = cluster_id;
    ref.member_count = n;
    ref.intervals.reserve((std::size_t)cluster_samples.cols());
    for (int k = 0; k < cluster_samples.cols(); ++k) {
        const double mean = cluster_samples.col(k).mean();
        const double var = (cluster_samples.col(k).array() - mean).square().sum() / n;
        const double sigma = std::sqrt(var);
        ref.intervals.emplace_back(mean - alpha * sigma, mean + alpha * sigma);
    }
    return ref;
}

int acceptance_count(const Eigen::VectorXd& test_projected, const ReferenceInterval& reference) {
    if ((std::size_t)test_projected.size() != reference.intervals.size())
        throw data_error("test vector length does not match the reference interval count");
    int count = 0;
    for (int k = 0; k < test_projected.size(); ++k) {
        const auto& [lo, hi] = reference.intervals[(std::size_t)k];
        if (test_projected[k] >= lo && test_projected[k] <= hi) ++count;
    }
    return count;
}

int required_count(double tau, int d) {
    return (int)std::ceil(tau * d - 1e-9);
}

int effective_cluster_count(int requested, int training_count) {
    int c = requested > 0 ? requested : (training_count >= 15 ? 3 : 1);
    return std::min(c, training_count);
}

UserModel enroll_user(const std::string& user_id, const Eigen::MatrixXd& train,
                      const EnrollParams& params, std::uint64_t seed) {
    const int M = (int)train.rows();
    if (M < 2) throw data_error("user " + user_id + ": enrollment needs at least 2 training samples");
    if (params.tau < 0.0 || params.tau > 1.0) throw config_error("tau must be in [0, 1]");

    UserModel model;
    model.user_id = user_id;
    model.alpha = params.alpha;
    model.tau = params.tau;
    model.normalization = fit_normalization(train);

    const Eigen::MatrixXd Z = apply_normalization(train, model.normalization);
    const FeatureSelection selection = select_user_features(Z, params.selection);
    model.selected_indices = selection.indices;

    const int d = (int)model.selected_indices.size();
    Eigen::MatrixXd projected(M, d);
    for (int k = 0; k < d; ++k) projected.col(k) = Z.col(model.selected_indices[(std::size_t)k]);

    const int C = effective_cluster_count(params.clusters, M);
    const FuzzyPartition partition = fuzzy_c_means(projected, C, params.fuzzifier,
                                                   params.fcm_tol, params.fcm_max_iter, seed);
    const std::vector<int> assignment = harden(partition);

    for (int cluster = 0; cluster < C; ++cluster) {
        std::vector<int> members;
        for (int j = 0; j < M; ++j)
            if (assignment[(std::size_t)j] == cluster) members.push_back(j);
        if (members.empty()) continue; // dropped: verification maxes over clusters
        Eigen::MatrixXd rows((int)members.size(), d);
        for (int r = 0; r < (int)members.size(); ++r)
            rows.row(r) = projected.row(members[(std::size_t)r]);
        model.references.push_back(build_reference(rows, params.alpha, cluster));
    }
    return model;
}

VerificationResult verify(const Eigen::VectorXd& test_features, const UserModel& model,
                          std::optional<double> tau_override) {
    if (test_features.size() != model.normalization.mean.size())
        throw data_error("test sample has " + std::to_string(test_features.size()) +
                         " features; model expects " +
                         std::to_string(model.normalization.mean.size()));
    if (model.references.empty()) throw data_error("model has no reference signatures");

    const Eigen::VectorXd z = apply_normalization(test_features, model.normalization);
    Eigen::VectorXd projected((int)model.selected_indices.size());
    for (int k = 0; k < projected.size(); ++k)
        projected[k] = z[model.selected_indices[(std::size_t)k]];

    VerificationResult result;
    result.tau_used = tau_override.value_or(model.tau);
    result.acceptance_count = -1;
    result.per_cluster_counts.reserve(model.references.size());
    for (const auto& ref : model.references) {
        const int count = acceptance_count(projected, ref);
        result.per_cluster_counts.push_back(count);
        if (count > result.acceptance_count) {
            result.acceptance_count = count;
            result.best_cluster = ref.cluster_id;
        }
    }
    const int d = (int)model.selected_indices.size();
    result.accepted = result.acceptance_count >= required_count(result.tau_used, d);
    return result;
}

} // namespace sigver
