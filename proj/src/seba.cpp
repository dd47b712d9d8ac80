#include "stclust/seba.hpp"

#include "stclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stclust {

namespace {

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& Z, double mu) {
    Eigen::MatrixXd S = Z;
    for (int j = 0; j < S.cols(); ++j) {
        for (int i = 0; i < S.rows(); ++i) {
            double z = Z(i, j);
            S(i, j) = z > mu ? z - mu : (z < -mu ? z + mu : 0.0);
        }
        double n = S.col(j).norm();
        if (n > 0) S.col(j) /= n;
    }
    return S;
}

double objective(const Eigen::MatrixXd& V, const Eigen::MatrixXd& S, const Eigen::MatrixXd& Q,
                 double mu) {
    return 0.5 * (V - S * Q).squaredNorm() + mu * S.cwiseAbs().sum();
}

}  // namespace

Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

SebaResult seba(const Eigen::MatrixXd& V, const SebaOptions& opt) {
    const int m = static_cast<int>(V.rows()), r = static_cast<int>(V.cols());
    if (r < 1 || m < r) throw ValidationError("SEBA needs an m x r bundle with 1 <= r <= m");
    Eigen::MatrixXd G = V.transpose() * V - Eigen::MatrixXd::Identity(r, r);
    if (G.cwiseAbs().maxCoeff() > 1e-8) throw ValidationError("SEBA input columns are not orthonormal");
    double mu = opt.mu.value_or(0.99 / std::sqrt(static_cast<double>(m)));
    if (!(mu >= 0)) throw ValidationError("SEBA mu must be nonnegative");

    // Initial rotation aligns the columns with the r best-conditioned rows.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V.transpose());
    Eigen::MatrixXd P(r, r);
    for (int j = 0; j < r; ++j) P.row(j) = V.row(qr.colsPermutation().indices()[j]);
    Eigen::MatrixXd Q = polar_factor(P);

    SebaResult res;
    res.mu = mu;
    Eigen::MatrixXd S;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iter; ++it) {
        S = soft_threshold(V * Q.transpose(), mu);
        Q = polar_factor(S.transpose() * V);
        double obj = objective(V, S, Q, mu);
        res.history.push_back(obj);
        res.iterations = it + 1;
        if (obj > prev + 1e-12 * std::max(1.0, std::abs(prev))) res.monotone = false;
        if (std::abs(prev - obj) <= opt.rel_tol * std::max(std::abs(obj), 1e-300) || obj == 0.0) {
            prev = obj;
            break;
        }
        prev = obj;
    }
    res.objective = prev;
    res.Q = Q;

    for (int j = 0; j < r; ++j) {
        Eigen::Index imax = 0;
        double mx = S.col(j).cwiseAbs().maxCoeff();
        for (int i = 0; i < m; ++i)
            if (std::abs(S(i, j)) >= mx * (1.0 - 1e-12)) {
                imax = i;
                break;
            }
        if (S(imax, j) < 0) S.col(j) = -S.col(j);
        if (mx > 0) S.col(j) /= mx;
    }
    res.S = S.cwiseMax(0.0);
    return res;
}

}  // namespace stclust
