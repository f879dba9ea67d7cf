#pragma once

#include <Eigen/Dense>
#include <string>

namespace sigver {

enum class Weighting { binary, heat_kernel, dot_product };

Weighting parse_weighting(const std::string& name);
std::string weighting_name(Weighting weighting);

struct AffinityGraph {
    Eigen::MatrixXd W; // symmetric, zero diagonal, nonnegative
    int p = 0;
    Weighting weighting = Weighting::heat_kernel;
    double heat_sigma = 0.0; // resolved value (heat_kernel only)
};

// Connects each point to its p nearest Euclidean neighbours and symmetrizes
// with W = max(W, W^T). heat_sigma <= 0 self-tunes to the mean squared
// distance over connected pairs.
AffinityGraph build_affinity_graph(const Eigen::MatrixXd& X, int p,
                                   Weighting weighting = Weighting::heat_kernel,
                                   double heat_sigma = 0.0);

struct LaplacianPair {
    Eigen::VectorXd degrees; // D_ii = sum_j W_ij
    Eigen::MatrixXd L;       // D - W
};

LaplacianPair degree_and_laplacian(const Eigen::MatrixXd& W);

} // namespace sigver
