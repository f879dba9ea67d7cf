#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace sigver {

struct FuzzyPartition {
    Eigen::MatrixXd U; // C x M memberships, columns sum to 1
    Eigen::MatrixXd V; // C x d centroids
    double m = 2.0;
    std::vector<double> objective_trace; // J per iteration, non-increasing
};

// Standard alternating FCM updates from a seed-deterministic random
// column-stochastic membership matrix; stops when the largest centroid shift
// drops below tol or after max_iter rounds. A point coincident with a
// centroid gets membership 1 there.
FuzzyPartition fuzzy_c_means(const Eigen::MatrixXd& X, int C, double m, double tol,
                             int max_iter, std::uint64_t seed);

// Same algorithm from an explicit initial membership matrix (tests and
// permutation/scale checks need initialization control).
FuzzyPartition fuzzy_c_means_from(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U0,
                                  double m, double tol, int max_iter);

// argmax membership per column; ties go to the lowest cluster index.
std::vector<int> harden(const FuzzyPartition& partition);

} // namespace sigver
