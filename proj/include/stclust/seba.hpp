#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace stclust {

struct SebaOptions {
    /// Soft-threshold level; 0.99/sqrt(m) when unset.
    std::optional<double> mu;
    double rel_tol = 1e-12;
    int max_iter = 5000;
};

struct SebaResult {
    /// m x r sparse vectors: sign-fixed, rescaled to max 1, negatives clipped.
    Eigen::MatrixXd S;
    Eigen::MatrixXd Q;
    double mu = 0.0;
    double objective = 0.0;
    int iterations = 0;
    std::vector<double> history;
    /// Every step satisfied objective[k+1] <= objective[k] (up to rounding).
    bool monotone = true;
};

/// Rotates an orthonormal bundle V (m x r) towards sparse near-indicator vectors.
SebaResult seba(const Eigen::MatrixXd& V, const SebaOptions& opt = {});

/// Orthogonal polar factor U V' of A = U S V'.
Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& A);

}  // namespace stclust
