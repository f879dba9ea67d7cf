#include "sigver/fuzzy_cmeans.hpp"

#include "sigver/errors.hpp"
#include "sigver/rng.hpp"

#include <cmath>
#include <string>

namespace sigver {

namespace {

// J = sum_ij u_ij^m ||x_j - v_i||^2
double objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U, const Eigen::MatrixXd& V,
                 double m) {
    double J = 0.0;
    for (int i = 0; i < U.rows(); ++i)
        for (int j = 0; j < U.cols(); ++j)
            J += std::pow(U(i, j), m) * (X.row(j) - V.row(i)).squaredNorm();
    return J;
}

void update_memberships(const Eigen::MatrixXd& X, const Eigen::MatrixXd& V, double m,
                        Eigen::MatrixXd& U) {
    const int C = (int)V.rows();
    const int M = (int)X.rows();
    const double exponent = 2.0 / (m - 1.0);
    Eigen::VectorXd dist(C);
    for (int j = 0; j < M; ++j) {
        int coincident = -1;
        for (int i = 0; i < C; ++i) {
            dist[i] = (X.row(j) - V.row(i)).norm();
            if (dist[i] == 0.0 && coincident < 0) coincident = i;
        }
        if (coincident >= 0) {
            U.col(j).setZero();
            U(coincident, j) = 1.0;
            continue;
        }
        for (int i = 0; i < C; ++i) {
            double denom = 0.0;
            for (int k = 0; k < C; ++k) denom += std::pow(dist[i] / dist[k], exponent);
            U(i, j) = 1.0 / denom;
        }
    }
}

} // namespace

FuzzyPartition fuzzy_c_means_from(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U0,
                                  double m, double tol, int max_iter) {
    const int M = (int)X.rows();
    const int C = (int)U0.rows();
    if (C < 1) throw config_error("cluster count C must be >= 1");
    if (C > M)
        throw config_error("cluster count C = " + std::to_string(C) + " exceeds sample count " +
                           std::to_string(M));
    if (U0.cols() != M) throw data_error("initial membership width does not match sample count");
    if (m <= 1.0) throw config_error("fuzzifier m must be > 1");

    FuzzyPartition part;
    part.m = m;
    part.U = U0;
    part.V = Eigen::MatrixXd::Zero(C, X.cols());

    Eigen::MatrixXd prev_V;
    for (int iter = 0; iter < max_iter; ++iter) {
        prev_V = part.V;
        // centroids from memberships
        for (int i = 0; i < C; ++i) {
            const Eigen::ArrayXd weights = part.U.row(i).transpose().array().pow(m);
            const double total = weights.sum();
            if (total > 0.0)
                part.V.row(i) = (X.array().colwise() * weights).colwise().sum() / total;
            // zero total membership: keep the previous centroid
        }
        update_memberships(X, part.V, m, part.U);
        part.objective_trace.push_back(objective(X, part.U, part.V, m));
        if (iter > 0 && (part.V - prev_V).cwiseAbs().maxCoeff() < tol) break;
    }
    return part;
}

FuzzyPartition fuzzy_c_means(const Eigen::MatrixXd& X, int C, double m, double tol,
                             int max_iter, std::uint64_t seed) {
    const int M = (int)X.rows();
    if (C < 1) throw config_error("cluster count C must be >= 1");
    if (C > M)
        throw config_error("cluster count C = " + std::to_string(C) + " exceeds sample count " +
                           std::to_string(M));
    Rng rng(seed);
    Eigen::MatrixXd U0(C, M);
    for (int j = 0; j < M; ++j) {
        double total = 0.0;
        for (int i = 0; i < C; ++i) {
            U0(i, j) = rng.next_double();
            total += U0(i, j);
        }
        if (total <= 0.0) {
            U0.col(j).setConstant(1.0 / C);
        } else {
            U0.col(j) /= total;
        }
    }
    return fuzzy_c_means_from(X, U0, m, tol, max_iter);
}

std::vector<int> harden(const FuzzyPartition& partition) {
    std::vector<int> assignment((std::size_t)partition.U.cols());
    for (int j = 0; j < partition.U.cols(); ++j) {
        int best = 0;
        for (int i = 1; i < partition.U.rows(); ++i)
            if (partition.U(i, j) > partition.U(best, j)) best = i;
        assignment[(std::size_t)j] = best;
    }
    return assignment;
}

} // namespace sigver
