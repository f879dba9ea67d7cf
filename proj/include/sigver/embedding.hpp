#pragma once

#include <Eigen/Dense>

namespace sigver {

struct SpectralEmbedding {
    Eigen::MatrixXd Y;           // M x K_c, columns D-orthonormal
    Eigen::VectorXd eigenvalues; // ascending, matching Y's columns
};

// Solves L y = lambda D y (D = diag(degrees)), discards the trivial smallest
// eigenvector, and returns the next K_c eigenpairs in ascending eigenvalue
// order. On a graph with c > 1 connected components the c-1 zero-eigenvalue
// vectors after the first are retained: they indicate the components.
SpectralEmbedding spectral_embedding(const Eigen::MatrixXd& L,
                                     const Eigen::VectorXd& degrees, int k_c);

} // namespace sigver
