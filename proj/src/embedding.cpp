#include "sigver/embedding.hpp"

#include "sigver/errors.hpp"

#include <Eigen/Eigenvalues>

#include <string>

namespace sigver {

SpectralEmbedding spectral_embedding(const Eigen::MatrixXd& L,
                                     const Eigen::VectorXd& degrees, int k_c) {
    const int M = (int)L.rows();
    if (L.cols() != M || degrees.size() != M)
        throw data_error("Laplacian and degree sizes disagree");
    if (k_c < 1) throw config_error("K_c must be >= 1");
    if (k_c >= M)
        throw config_error("K_c = " + std::to_string(k_c) + " needs more than K_c samples (got " +
                           std::to_string(M) + ")");
    for (int i = 0; i < M; ++i)
        if (degrees[i] <= 0.0)
            throw data_error("vertex " + std::to_string(i) +
                             " is isolated (zero degree); increase the neighbour count p");

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M, M);
    D.diagonal() = degrees;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(L, D,
                                                                     Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success)
        throw data_error("generalized eigensolver failed to converge");

    // Columns are D-orthonormal and sorted ascending; column 0 is the trivial
    // vector (constant on a connected graph).
    SpectralEmbedding embedding;
    embedding.Y = solver.eigenvectors().block(0, 1, M, k_c);
    embedding.eigenvalues = solver.eigenvalues().segment(1, k_c);
    return embedding;
}

} // namespace sigver
