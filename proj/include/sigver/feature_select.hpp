#pragma once

#include "sigver/affinity.hpp"

#include <Eigen/Dense>
#include <vector>

namespace sigver {

// Per-feature standardization fitted on a training matrix. Zero-variance
// features keep scale 1 so they standardize to constant 0.
struct Normalization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
};

Normalization fit_normalization(const Eigen::MatrixXd& X);
Eigen::MatrixXd apply_normalization(const Eigen::MatrixXd& X, const Normalization& norm);
Eigen::VectorXd apply_normalization(const Eigen::VectorXd& x, const Normalization& norm);

struct SelectionParams {
    int p = 5;                                    // kNN neighbour count
    Weighting weighting = Weighting::heat_kernel; // edge weight scheme
    double heat_sigma = 0.0;                      // <= 0 self-tunes
    int k_c = 5;                                  // spectral embedding width
    int d = 10;                                   // features to keep
};

struct FeatureSelection {
    std::vector<int> indices; // d indices, descending score, index tie-break
    Eigen::VectorXd scores;   // all K scores: max_i |a_ij|
};

// score(j) = max over rows of |A(i, j)|; rows are per-eigenvector coefficient
// vectors.
Eigen::VectorXd mcfs_scores(const Eigen::MatrixXd& A);

// Full per-user pipeline on an M x K standardized genuine training matrix:
// kNN affinity graph -> Laplacian -> generalized spectral embedding -> one
// L1 path regression per eigenvector -> max-|coefficient| feature ranking.
// p is clamped to M-1 and k_c to M-2 so small training sets work.
FeatureSelection select_user_features(const Eigen::MatrixXd& X, const SelectionParams& params);

} // namespace sigver
