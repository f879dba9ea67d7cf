#include "sigver/affinity.hpp"

#include "sigver/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sigver {

Weighting parse_weighting(const std::string& name) {
    if (name == "binary") return Weighting::binary;
    if (name == "heat_kernel") return Weighting::heat_kernel;
    if (name == "dot_product") return Weighting::dot_product;
    throw config_error("unknown weighting '" + name +
                       "' (expected binary|heat_kernel|dot_product)");
}

std::string weighting_name(Weighting weighting) {
    switch (weighting) {
        case Weighting::binary: return "binary";
        case Weighting::heat_kernel: return "heat_kernel";
        case Weighting::dot_product: return "dot_product";
    }
    return "?";
}

AffinityGraph build_affinity_graph(const Eigen::MatrixXd& X, int p, Weighting weighting,
                                   double heat_sigma) {
    const int M = (int)X.rows();
    if (p < 1) throw config_error("neighbour count p must be >= 1");
    if (p >= M)
        throw config_error("neighbour count p = " + std::to_string(p) +
                           " needs more than p samples (got " + std::to_string(M) + ")");
    if (!X.allFinite()) throw data_error("affinity graph input contains non-finite values");

    // Pairwise squared Euclidean distances; tiny negatives from the expansion
    // are clamped so duplicate points come out at exactly 0.
    Eigen::VectorXd sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd dist2 =
        (sq.replicate(1, M) + sq.transpose().replicate(M, 1) - 2.0 * X * X.transpose())
            .cwiseMax(0.0);
    dist2.diagonal().setZero();

    // p nearest per row; ties broken by lower index for determinism.
    Eigen::MatrixXd adjacent = Eigen::MatrixXd::Zero(M, M);
    std::vector<int> order(M);
    for (int i = 0; i < M; ++i) {
        order.clear();
        for (int j = 0; j < M; ++j)
            if (j != i) order.push_back(j);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (dist2(i, a) != dist2(i, b)) return dist2(i, a) < dist2(i, b);
            return a < b;
        });
        for (int n = 0; n < p; ++n) adjacent(i, order[(std::size_t)n]) = 1.0;
    }
    adjacent = adjacent.cwiseMax(adjacent.transpose());

    double sigma = heat_sigma;
    if (weighting == Weighting::heat_kernel && sigma <= 0.0) {
        double total = 0.0;
        int count = 0;
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j)
                if (adjacent(i, j) > 0.0) {
                    total += dist2(i, j);
                    ++count;
                }
        sigma = count > 0 ? total / count : 1.0;
        if (sigma <= 0.0) sigma = 1.0; // all connected pairs coincident
    }

    AffinityGraph graph;
    graph.p = p;
    graph.weighting = weighting;
    graph.heat_sigma = weighting == Weighting::heat_kernel ? sigma : 0.0;
    graph.W = Eigen::MatrixXd::Zero(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            if (i == j || adjacent(i, j) == 0.0) continue;
            double w = 0.0;
            switch (weighting) {
                case Weighting::binary: w = 1.0; break;
                case Weighting::heat_kernel: w = std::exp(-dist2(i, j) / sigma); break;
                case Weighting::dot_product: w = std::max(0.0, X.row(i).dot(X.row(j))); break;
            }
            graph.W(i, j) = w;
        }
    }
    return graph;
}

LaplacianPair degree_and_laplacian(const Eigen::MatrixXd& W) {
    if (W.rows() != W.cols()) throw data_error("weight matrix must be square");
    if (!W.isApprox(W.transpose(), 1e-12)) throw data_error("weight matrix must be symmetric");
    if (W.minCoeff() < 0.0) throw data_error("weight matrix must be nonnegative");
    LaplacianPair pair;
    pair.degrees = W.rowwise().sum();
    pair.L = -W;
    pair.L.diagonal() += pair.degrees;
    return pair;
}

} // namespace sigver
