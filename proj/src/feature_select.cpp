#include "sigver/feature_select.hpp"

#include "sigver/embedding.hpp"
#include "sigver/errors.hpp"
#include "sigver/lars.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sigver {

Normalization fit_normalization(const Eigen::MatrixXd& X) {
    const int M = (int)X.rows();
    if (M < 1) throw data_error("cannot fit normalization on an empty matrix");
    Normalization norm;
    norm.mean = X.colwise().mean();
    norm.scale.resize(X.cols());
    for (int j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - norm.mean[j]).square().sum() / M;
        const double sd = std::sqrt(var);
        norm.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return norm;
}

Eigen::MatrixXd apply_normalization(const Eigen::MatrixXd& X, const Normalization& norm) {
    if (X.cols() != norm.mean.size())
        throw data_error("feature count does not match the fitted normalization");
    return (X.rowwise() - norm.mean.transpose()).array().rowwise() /
           norm.scale.transpose().array();
}

Eigen::VectorXd apply_normalization(const Eigen::VectorXd& x, const Normalization& norm) {
    if (x.size() != norm.mean.size())
        throw data_error("feature count does not match the fitted normalization");
    return (x - norm.mean).cwiseQuotient(norm.scale);
}

Eigen::VectorXd mcfs_scores(const Eigen::MatrixXd& A) {
    if (A.rows() < 1) throw data_error("coefficient matrix is empty");
    return A.cwiseAbs().colwise().maxCoeff();
}

FeatureSelection select_user_features(const Eigen::MatrixXd& X, const SelectionParams& params) {
    const int M = (int)X.rows();
    const int K = (int)X.cols();
    if (M < 3) throw data_error("feature selection needs at least 3 training samples");
    if (params.d < 1) throw config_error("selection size d must be >= 1");
    if (params.d > K)
        throw config_error("selection size d = " + std::to_string(params.d) +
                           " exceeds feature count K = " + std::to_string(K));
    if (params.p < 1) throw config_error("neighbour count p must be >= 1");
    if (params.k_c < 1) throw config_error("K_c must be >= 1");

    const int p = std::min(params.p, M - 1);
    const int k_c = std::max(1, std::min(params.k_c, M - 2));
    const int lars_cardinality = std::min(params.d, M - 1);

    const AffinityGraph graph = build_affinity_graph(X, p, params.weighting, params.heat_sigma);
    const LaplacianPair lap = degree_and_laplacian(graph.W);
    const SpectralEmbedding embedding = spectral_embedding(lap.L, lap.degrees, k_c);

    Eigen::MatrixXd A(k_c, K);
    for (int i = 0; i < k_c; ++i)
        A.row(i) = lars_regression(X, embedding.Y.col(i), lars_cardinality).transpose();

    FeatureSelection selection;
    selection.scores = mcfs_scores(A);
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (selection.scores[a] != selection.scores[b])
            return selection.scores[a] > selection.scores[b];
        return a < b;
    });
    selection.indices.assign(order.begin(), order.begin() + params.d);
    return selection;
}

} // namespace sigver
