#include "stclust/cheeger.hpp"

#include "stclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stclust {

std::vector<int> Packing::labels() const {
    std::vector<int> lab(n, -2);
    for (int k = 0; k < K(); ++k)
        for (int v : elements[k]) {
            if (v < 0 || v >= n) throw ValidationError("packing vertex out of range");
            if (lab[v] != -2) throw ValidationError("packing elements overlap");
            lab[v] = k;
        }
    for (int v : omega) {
        if (v < 0 || v >= n) throw ValidationError("packing vertex out of range");
        if (lab[v] != -2) throw ValidationError("omega overlaps a packing element");
        lab[v] = -1;
    }
    return lab;
}

void Packing::validate() const {
    auto lab = labels();
    for (int v = 0; v < n; ++v)
        if (lab[v] == -2)
            throw ValidationError("vertex " + std::to_string(v + 1) + " is not covered by the packing");
    for (const auto& X : elements)
        if (X.empty()) throw ValidationError("packing has an empty element");
}

Packing Packing::from_labels(const std::vector<int>& labels) {
    Packing p;
    p.n = static_cast<int>(labels.size());
    int K = 0;
    for (int l : labels) K = std::max(K, l + 1);
    std::vector<std::vector<int>> el(K);
    for (int v = 0; v < p.n; ++v) {
        if (labels[v] < 0)
            p.omega.push_back(v);
        else
            el[labels[v]].push_back(v);
    }
    for (auto& X : el)
        if (!X.empty()) p.elements.push_back(std::move(X));
    return p;
}

namespace {

std::vector<char> mask_of(const std::vector<int>& X, int n) {
    std::vector<char> in(n, 0);
    for (int v : X) {
        if (v < 0 || v >= n) throw ValidationError("vertex out of range");
        in[v] = 1;
    }
    return in;
}

}  // namespace

double cut_value(const std::vector<int>& X, const SpMat& W) {
    int n = static_cast<int>(W.rows());
    auto in = mask_of(X, n);
    double s = 0.0;
    for (int k = 0; k < W.outerSize(); ++k) {
        if (!in[k]) continue;
        for (SpMat::InnerIterator it(W, k); it; ++it)
            if (!in[it.row()]) s += it.value();
    }
    return s;
}

double cheeger_ratio(const std::vector<int>& X, const SpMat& W, bool normalised) {
    if (X.empty()) throw ValidationError("Cheeger ratio of an empty set");
    double cut = cut_value(X, W);
    if (!normalised) return cut / static_cast<double>(X.size());
    double vol = 0.0;
    for (int v : X)
        for (SpMat::InnerIterator it(W, v); it; ++it) vol += it.value();
    if (!(vol > 0)) throw ValidationError("Cheeger ratio of a zero-volume set");
    return cut / vol;
}

double packing_score(const Packing& p, const SpMat& W, bool normalised, bool include_omega) {
    if (p.elements.empty() && !(include_omega && !p.omega.empty()))
        throw ValidationError("empty packing");
    double h = 0.0;
    for (const auto& X : p.elements) h = std::max(h, cheeger_ratio(X, W, normalised));
    if (include_omega && !p.omega.empty()) h = std::max(h, cheeger_ratio(p.omega, W, normalised));
    return h;
}

namespace {

class Enumerator {
public:
    Enumerator(const SpMat& W, int K, bool normalised)
        : n_(static_cast<int>(W.rows())), K_(K), normalised_(normalised), W_(Eigen::MatrixXd(W)) {
        deg_ = W_.rowwise().sum();
        assign_.assign(n_, 0);
    }

    BruteForceResult run() {
        dfs(0, 0);
        BruteForceResult r;
        if (!found_) throw ValidationError("no valid packing exists");
        r.h = best_;
        std::vector<int> lab(n_);
        for (int v = 0; v < n_; ++v) lab[v] = best_assign_[v] - 1;
        r.packing = Packing::from_labels(lab);
        return r;
    }

private:
    double denom(int size, double vol) const { return normalised_ ? vol : static_cast<double>(size); }

    // Lower bound from edges already known to be cut, with every unassigned
    // vertex optimistically joining each element.
    double lower_bound(int depth) const {
        double rem_size = n_ - depth, rem_vol = 0.0;
        for (int v = depth; v < n_; ++v) rem_vol += deg_[v];
        double lb = 0.0;
        for (int k = 1; k <= K_; ++k) {
            double cut = 0.0, vol = 0.0;
            int size = 0;
            for (int u = 0; u < depth; ++u) {
                if (assign_[u] != k) continue;
                ++size;
                vol += deg_[u];
                for (int v = 0; v < depth; ++v)
                    if (assign_[v] != k) cut += W_(u, v);
            }
            if (size == 0) continue;
            double d = denom(size + static_cast<int>(rem_size), vol + rem_vol);
            if (d > 0) lb = std::max(lb, cut / d);
        }
        return lb;
    }

    double leaf_value() const {
        double h = 0.0;
        for (int k = 1; k <= K_; ++k) {
            double cut = 0.0, vol = 0.0;
            int size = 0;
            for (int u = 0; u < n_; ++u) {
                if (assign_[u] != k) continue;
                ++size;
                vol += deg_[u];
                for (int v = 0; v < n_; ++v)
                    if (assign_[v] != k) cut += W_(u, v);
            }
            double d = denom(size, vol);
            if (!(d > 0)) return std::numeric_limits<double>::infinity();
            h = std::max(h, cut / d);
        }
        return h;
    }

    bool worse_or_equal(double v) const {
        return found_ && v >= best_ - 1e-12 * std::max(1.0, std::abs(best_));
    }

    void dfs(int depth, int used) {
        if (K_ - used > n_ - depth) return;
        if (depth == n_) {
            double h = leaf_value();
            if (std::isfinite(h) && !worse_or_equal(h)) {
                best_ = h;
                best_assign_ = assign_;
                found_ = true;
            }
            return;
        }
        if (found_ && depth > 0 && worse_or_equal(lower_bound(depth))) return;
        int top = std::min(K_, used + 1);
        for (int l = 0; l <= top; ++l) {
            assign_[depth] = l;
            dfs(depth + 1, std::max(used, l));
        }
        assign_[depth] = 0;
    }

    int n_, K_;
    bool normalised_;
    Eigen::MatrixXd W_;
    Eigen::VectorXd deg_;
    std::vector<int> assign_, best_assign_;
    double best_ = std::numeric_limits<double>::infinity();
    bool found_ = false;
};

double second_smallest(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues()[1]);
}

}  // namespace

BruteForceResult brute_force_cheeger(const SpMat& W, int K, bool normalised) {
    int n = static_cast<int>(W.rows());
    if (n > 12) throw ValidationError("brute-force Cheeger is limited to n <= 12");
    if (K < 1 || K > n) throw ValidationError("K must be in 1..n");
    return Enumerator(W, K, normalised).run();
}

CheegerReport check_cheeger_inequalities(const SpMat& W) {
    int n = static_cast<int>(W.rows());
    if (n < 2) throw ValidationError("Cheeger inequalities need at least two vertices");
    CheegerReport r;
    Eigen::MatrixXd Wd(W);
    Eigen::VectorXd d = Wd.rowwise().sum();
    r.max_degree = d.maxCoeff();
    Eigen::MatrixXd L = Eigen::MatrixXd(d.asDiagonal()) - Wd;
    r.lambda2 = second_smallest(L);
    r.h2 = brute_force_cheeger(W, 2, false).h;
    double bound = std::sqrt(2.0 * r.lambda2 * r.max_degree);
    r.unnormalised_slack = bound - r.h2;
    r.unnormalised_holds = r.unnormalised_slack >= -1e-12;
    if (d.minCoeff() > 0) {
        r.normalised_available = true;
        Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
        Eigen::MatrixXd Ln = Eigen::MatrixXd::Identity(n, n) - s.asDiagonal() * Wd * s.asDiagonal();
        r.lambda2_normalised = second_smallest(0.5 * (Ln + Ln.transpose()));
        r.h2_normalised = brute_force_cheeger(W, 2, true).h;
        r.normalised_slack = std::sqrt(2.0 * r.lambda2_normalised) - r.h2_normalised;
        r.normalised_holds = r.normalised_slack >= -1e-12;
    }
    return r;
}

}  // namespace stclust
