#include "stclust/matching.hpp"

#include "stclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stclust {

std::vector<int> hungarian_max(const Eigen::MatrixXd& C) {
    // Shortest augmenting path on cost = -C; rows <= cols.
    const int n = static_cast<int>(C.rows()), m = static_cast<int>(C.cols());
    if (n > m) throw ValidationError("assignment needs rows <= cols");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = -C(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j]) col[p[j] - 1] = j - 1;
    return col;
}

namespace {

void check_partition(const SlicePartition& P, const TemporalNetwork& net, int t) {
    std::vector<char> seen(net.vertex_count(), 0);
    auto mark = [&](int x) {
        if (x < 0 || x >= net.vertex_count() || net.index().find(t, x) < 0)
            throw ValidationError("slice " + std::to_string(t + 1) + " partition has an absent vertex");
        if (seen[x]) throw ValidationError("slice " + std::to_string(t + 1) + " partition overlaps");
        seen[x] = 1;
    };
    for (const auto& X : P.clusters) {
        if (X.empty()) throw ValidationError("slice " + std::to_string(t + 1) + " has an empty cluster");
        for (int x : X) mark(x);
    }
    for (int x : P.omega) mark(x);
    for (int x : net.present(t))
        if (!seen[x])
            throw ValidationError("slice " + std::to_string(t + 1) + " partition misses vertex " +
                                  std::to_string(x + 1));
}

std::vector<std::vector<int>> groups_of(const SlicePartition& P) {
    auto g = P.clusters;
    if (!P.omega.empty()) g.push_back(P.omega);
    return g;
}

// Rows >= cols orientation: each row exactly one column, each column at least one row.
CoverResult cover_tall(const Eigen::MatrixXd& C) {
    const int m = static_cast<int>(C.rows()), n = static_cast<int>(C.cols());
    Eigen::VectorXd rowmax(m);
    std::vector<int> argmax(m);
    for (int i = 0; i < m; ++i) {
        int best = 0;
        for (int j = 1; j < n; ++j)
            if (C(i, j) > C(i, best)) best = j;
        argmax[i] = best;
        rowmax[i] = C(i, best);
    }
    Eigen::MatrixXd G(n, m);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) G(j, i) = C(i, j) - rowmax[i];
    std::vector<int> rep = hungarian_max(G);
    std::vector<int> col(argmax);
    for (int j = 0; j < n; ++j) col[rep[j]] = j;
    CoverResult r;
    r.A = Eigen::MatrixXi::Zero(m, n);
    for (int i = 0; i < m; ++i) {
        r.A(i, col[i]) = 1;
        r.total += C(i, col[i]);
    }
    return r;
}

}  // namespace

CoverInstance slice_cut_matrix(const SlicePartition& Pt, const SlicePartition& Pt1,
                               const TemporalNetwork& net, double a, int t) {
    if (t < 0 || t + 1 >= net.slice_count()) throw ValidationError("slice index out of range");
    check_partition(Pt, net, t);
    check_partition(Pt1, net, t + 1);
    auto g0 = groups_of(Pt), g1 = groups_of(Pt1);
    std::vector<int> where(net.vertex_count(), -1);
    for (size_t j = 0; j < g1.size(); ++j)
        for (int x : g1[j]) where[x] = static_cast<int>(j);
    double w = net.temporal_weights()(t, t + 1);
    CoverInstance inst;
    inst.C = Eigen::MatrixXd::Zero(static_cast<int>(g0.size()), static_cast<int>(g1.size()));
    for (size_t i = 0; i < g0.size(); ++i)
        for (int x : g0[i])
            if (where[x] >= 0) inst.C(static_cast<int>(i), where[x]) -= a * a * w;
    return inst;
}

CoverResult rmwec(const Eigen::MatrixXd& C) {
    if (C.rows() == 0 || C.cols() == 0) throw ValidationError("empty cover instance");
    if (!C.allFinite()) throw ValidationError("cover weights must be finite");
    if (C.rows() >= C.cols()) return cover_tall(C);
    CoverResult r = cover_tall(C.transpose());
    r.A.transposeInPlace();
    return r;
}

LinkResult link_partitions(const std::vector<SlicePartition>& seq, const TemporalNetwork& net, double a) {
    const int T = net.slice_count();
    if (static_cast<int>(seq.size()) != T) throw ValidationError("need one partition per slice");
    for (int t = 0; t < T; ++t) check_partition(seq[t], net, t);

    LinkResult res;
    res.labels.resize(T);
    std::vector<std::vector<int>> glabel(T);  // per group including omega
    auto groups0 = groups_of(seq[0]);
    for (size_t i = 0; i < groups0.size(); ++i) glabel[0].push_back(static_cast<int>(i));
    int total_labels = static_cast<int>(groups0.size());

    for (int t = 0; t + 1 < T; ++t) {
        auto g1 = groups_of(seq[t + 1]);
        Eigen::MatrixXd C = slice_cut_matrix(seq[t], seq[t + 1], net, a, t).C;
        // Maximising the linked temporal mass (-C) minimises the weight left
        // between unlinked clusters; maximising C itself would pair disjoint clusters.
        CoverResult cov = rmwec(-C);
        const int k0 = static_cast<int>(C.rows()), k1 = static_cast<int>(C.cols());
        std::vector<int> lab(k1, -1);
        if (k0 >= k1) {
            // Each later cluster keeps the label of its heaviest predecessor.
            for (int j = 0; j < k1; ++j) {
                int best = -1;
                std::vector<int> from;
                for (int i = 0; i < k0; ++i)
                    if (cov.A(i, j)) {
                        from.push_back(glabel[t][i]);
                        if (best < 0 || C(i, j) < C(best, j)) best = i;
                    }
                lab[j] = glabel[t][best];
                if (from.size() > 1) res.events.push_back({t, true, from, {lab[j]}});
            }
        } else {
            for (int i = 0; i < k0; ++i) {
                int best = -1;
                for (int j = 0; j < k1; ++j)
                    if (cov.A(i, j)) {
                        if (best < 0 || C(i, j) < C(i, best)) best = j;
                    }
                lab[best] = glabel[t][i];
            }
            for (int j = 0; j < k1; ++j) {
                if (lab[j] >= 0) continue;
                int l = 0;
                while (l < total_labels && std::find(lab.begin(), lab.end(), l) != lab.end()) ++l;
                if (l == total_labels) ++total_labels;
                lab[j] = l;
            }
            for (int i = 0; i < k0; ++i) {
                std::vector<int> to;
                for (int j = 0; j < k1; ++j)
                    if (cov.A(i, j)) to.push_back(lab[j]);
                if (to.size() > 1) res.events.push_back({t, false, {glabel[t][i]}, to});
            }
        }
        glabel[t + 1] = lab;
    }

    // Spacetime labels; omega vertices return to the unclustered set.
    const auto& idx = net.index();
    std::vector<int> st(idx.size(), -1);
    for (int t = 0; t < T; ++t) {
        const auto& P = seq[t];
        for (size_t i = 0; i < P.clusters.size(); ++i) {
            res.labels[t].push_back(glabel[t][i]);
            for (int x : P.clusters[i]) st[idx.encode(t, x)] = glabel[t][i];
        }
    }
    // Compact labels to 0..K-1 in order of first appearance.
    std::vector<int> remap(total_labels + 1, -1);
    int K = 0;
    for (int i = 0; i < idx.size(); ++i)
        if (st[i] >= 0) {
            if (remap[st[i]] < 0) remap[st[i]] = K++;
            st[i] = remap[st[i]];
        }
    for (auto& row : res.labels)
        for (auto& l : row) l = remap[l];
    for (auto& e : res.events) {
        for (auto& l : e.from) l = l < static_cast<int>(remap.size()) ? remap[l] : -1;
        for (auto& l : e.to) l = l < static_cast<int>(remap.size()) ? remap[l] : -1;
    }
    res.packing = Packing::from_labels(st);
    res.K = res.packing.K();
    return res;
}

double temporal_cut(const std::vector<int>& labels, const TemporalNetwork& net, double a) {
    const auto& idx = net.index();
    if (static_cast<int>(labels.size()) != idx.size()) throw ValidationError("label count must be N'");
    const auto& Wp = net.temporal_weights();
    double s = 0.0;
    for (int t = 0; t < net.slice_count(); ++t)
        for (int u = t + 1; u < net.slice_count(); ++u) {
            if (Wp(t, u) == 0.0) continue;
            if (!net.is_multiplex() && u != t + 1) continue;
            for (int x : net.present(t)) {
                int j = idx.find(u, x);
                if (j < 0) continue;
                if (labels[idx.find(t, x)] != labels[j]) s += a * a * Wp(t, u);
            }
        }
    return s;
}

}  // namespace stclust
