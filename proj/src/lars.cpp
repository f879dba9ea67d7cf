#include "sigver/lars.hpp"

#include "sigver/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <vector>

namespace sigver {

namespace {
constexpr double kCorrTol = 1e-12;  // residual correlation considered zero
constexpr double kStepTol = 1e-12;  // smallest admissible path advance
} // namespace

Eigen::VectorXd lars_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int d) {
    const int M = (int)X.rows();
    const int K = (int)X.cols();
    if (d <= 0) throw config_error("LARS target cardinality d must be positive");
    if (y.size() != M) throw data_error("LARS target length does not match sample count");

    std::vector<bool> eligible(K);
    for (int j = 0; j < K; ++j) eligible[(std::size_t)j] = X.col(j).squaredNorm() > 1e-24;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(K);
    std::vector<int> active;
    std::vector<bool> is_active(K, false);
    bool just_dropped = false;
    const int target = std::min(d, K);
    const int max_iter = 8 * (K + M) + 64;

    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::VectorXd c = X.transpose() * (y - X * beta);

        double c_max = 0.0;
        for (int j = 0; j < K; ++j)
            if (eligible[(std::size_t)j]) c_max = std::max(c_max, std::abs(c[j]));
        if (c_max < kCorrTol) break; // exact fit

        if (!just_dropped) {
            int best = -1;
            double best_abs = -1.0;
            for (int j = 0; j < K; ++j) {
                if (!eligible[(std::size_t)j] || is_active[(std::size_t)j]) continue;
                const double a = std::abs(c[j]);
                if (a > best_abs) {
                    best_abs = a;
                    best = j;
                }
            }
            if (best < 0) break; // every eligible feature already active
            active.push_back(best);
            is_active[(std::size_t)best] = true;
        }
        just_dropped = false;

        const int n_active = (int)active.size();
        Eigen::VectorXd signs(n_active);
        Eigen::MatrixXd Xa(M, n_active);
        for (int a = 0; a < n_active; ++a) {
            signs[a] = c[active[(std::size_t)a]] >= 0.0 ? 1.0 : -1.0;
            Xa.col(a) = X.col(active[(std::size_t)a]) * signs[a];
        }

        Eigen::MatrixXd G = Xa.transpose() * Xa;
        Eigen::VectorXd w1 = G.ldlt().solve(Eigen::VectorXd::Ones(n_active));
        double denom = w1.sum();
        if (!w1.allFinite() || denom <= 0.0) {
            // near-singular active Gram (heavily collinear actives): jitter once
            G.diagonal().array() += 1e-10 * G.trace() / n_active + 1e-300;
            w1 = G.ldlt().solve(Eigen::VectorXd::Ones(n_active));
            denom = w1.sum();
            if (!w1.allFinite() || denom <= 0.0) break;
        }
        const double a_norm = 1.0 / std::sqrt(denom);
        const Eigen::VectorXd w = a_norm * w1;        // equiangular weights
        const Eigen::VectorXd u = Xa * w;             // unit equiangular vector
        const Eigen::VectorXd a_corr = X.transpose() * u;

        // step to the next feature entry (or to the full fit if none remain)
        double gamma_enter = c_max / a_norm;
        for (int j = 0; j < K; ++j) {
            if (!eligible[(std::size_t)j] || is_active[(std::size_t)j]) continue;
            const double cand1 = (c_max - c[j]) / (a_norm - a_corr[j]);
            const double cand2 = (c_max + c[j]) / (a_norm + a_corr[j]);
            if (cand1 > kStepTol && cand1 < gamma_enter) gamma_enter = cand1;
            if (cand2 > kStepTol && cand2 < gamma_enter) gamma_enter = cand2;
        }

        // lasso modification: first active coefficient to cross zero
        double gamma_drop = std::numeric_limits<double>::infinity();
        int drop_pos = -1;
        for (int a = 0; a < n_active; ++a) {
            const double direction = signs[a] * w[a];
            const double cross = -beta[active[(std::size_t)a]] / direction;
            if (cross > kStepTol && cross < gamma_drop) {
                gamma_drop = cross;
                drop_pos = a;
            }
        }

        const double gamma = std::min(gamma_enter, gamma_drop);
        if (!(gamma > 0.0) || !std::isfinite(gamma)) break;
        for (int a = 0; a < n_active; ++a)
            beta[active[(std::size_t)a]] += gamma * signs[a] * w[a];

        if (drop_pos >= 0 && gamma_drop <= gamma_enter) {
            const int j = active[(std::size_t)drop_pos];
            beta[j] = 0.0;
            is_active[(std::size_t)j] = false;
            active.erase(active.begin() + drop_pos);
            just_dropped = true;
            continue;
        }
        if ((int)active.size() >= target) break;
    }
    return beta;
}

} // namespace sigver
