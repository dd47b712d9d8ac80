#include "stclust/partitioner.hpp"

#include "stclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace stclust {

std::string to_string(TransitionEvent::Kind k) {
    switch (k) {
        case TransitionEvent::Kind::Split: return "split";
        case TransitionEvent::Kind::Merge: return "merge";
        case TransitionEvent::Kind::Appearance: return "appearance";
        default: return "disappearance";
    }
}

Eigen::MatrixXd slice_norms(const Eigen::MatrixXd& F, const SpacetimeIndexMap& index) {
    if (F.rows() != index.size()) throw ValidationError("vector length must match the spacetime size");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(index.slice_count(), F.cols());
    for (int i = 0; i < index.size(); ++i) out.row(index.decode(i).first) += F.row(i).cwiseAbs2();
    return out.cwiseSqrt();
}

Eigen::MatrixXd companion_vectors(const Eigen::MatrixXd& F, const SpacetimeIndexMap& index,
                                  CompanionMode mode) {
    Eigen::MatrixXd norms = slice_norms(F, index);
    if (mode == CompanionMode::SquaredNorm) norms = norms.cwiseAbs2();
    Eigen::MatrixXd out(F.rows(), 2 * F.cols());
    for (int c = 0; c < F.cols(); ++c) {
        out.col(2 * c) = F.col(c);
        for (int i = 0; i < index.size(); ++i) out(i, 2 * c + 1) = norms(index.decode(i).first, c);
    }
    return out;
}

SelectR select_R(const Eigen::VectorXd& v, const std::vector<std::pair<int, double>>& ratios,
                 double tie_band) {
    SelectR s;
    double best_gap = 0.0;
    for (int k = 1; k + 1 < v.size(); ++k) {
        double g = (v[k + 1] - v[k]) / std::max(v[k], 1e-12);
        s.gaps.push_back(g);
        if (g > best_gap * (1.0 + 1e-12) && g > 1e-12) {
            best_gap = g;
            s.gap_R = k;
        }
    }
    if (ratios.empty()) {
        s.R = s.argmin = std::max(1, s.gap_R);
        return s;
    }
    double hmin = ratios.front().second;
    s.argmin = ratios.front().first;
    for (const auto& [R, h] : ratios)
        if (h < hmin) {
            hmin = h;
            s.argmin = R;
        }
    s.R = s.argmin;
    for (const auto& [R, h] : ratios)
        if (R == s.gap_R && R != s.argmin && h <= hmin * (1.0 + tie_band)) s.R = R;
    return s;
}

std::vector<ColumnInfo> detect_spurious(const Eigen::MatrixXd& S, const SpacetimeIndexMap& index,
                                        const SpMat& W, double kappa, double fibre_tol, double theta) {
    const int n = index.size(), T = index.slice_count();
    if (S.rows() != n || W.rows() != n) throw ValidationError("column length must match the spacetime size");
    std::vector<ColumnInfo> info(S.cols());
    std::vector<double> ratios;
    for (int c = 0; c < S.cols(); ++c) {
        std::vector<int> supp;
        for (int i = 0; i < n; ++i)
            if (S(i, c) > theta) supp.push_back(i);
        auto& ci = info[c];
        ci.support = static_cast<int>(supp.size());
        if (supp.empty()) {
            ci.spurious = true;
            ci.reason = "empty";
            continue;
        }
        ci.ratio = cheeger_ratio(supp, W, false);
        ratios.push_back(ci.ratio);
        bool constant = true;
        for (int t = 0; t < T && constant; ++t) {
            auto fibre = S.col(c).segment(index.offset(t), index.slice_size(t));
            if ((fibre.array() > theta).any()) {
                double mean = fibre.mean();
                double var = (fibre.array() - mean).square().mean();
                if (var > fibre_tol * mean * mean) constant = false;
            }
        }
        if (constant) {
            ci.spurious = true;
            ci.reason = "fibre-constant";
        }
    }
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        size_t m = ratios.size();
        double med = m % 2 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
        for (auto& ci : info)
            if (!ci.spurious && ci.support > 0 && ci.ratio > kappa * med) {
                ci.spurious = true;
                ci.reason = "ratio";
            }
    }
    return info;
}

Packing assign_packing(const Eigen::MatrixXd& S, const std::vector<ColumnInfo>& columns, double theta,
                       std::vector<int>* element_columns) {
    const int n = static_cast<int>(S.rows());
    if (static_cast<int>(columns.size()) != S.cols()) throw ValidationError("column info size mismatch");
    std::vector<std::vector<int>> members(S.cols());
    Packing p;
    p.n = n;
    for (int i = 0; i < n; ++i) {
        int best = -1;
        for (int c = 0; c < S.cols(); ++c) {
            if (columns[c].spurious || !(S(i, c) > theta)) continue;
            if (best < 0 || S(i, c) > S(i, best)) best = c;
        }
        if (best < 0)
            p.omega.push_back(i);
        else
            members[best].push_back(i);
    }
    if (element_columns) element_columns->clear();
    for (int c = 0; c < S.cols(); ++c)
        if (!members[c].empty()) {
            p.elements.push_back(std::move(members[c]));
            if (element_columns) element_columns->push_back(c);
        }
    return p;
}

namespace {

struct BundleResult {
    Eigen::MatrixXd inputs;
    SebaResult seba;
    std::vector<ColumnInfo> columns;
    double mean_ratio = 0.0;
};

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& B) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
    qr.setThreshold(1e-10);
    int r = static_cast<int>(qr.rank());
    return Eigen::MatrixXd(qr.householderQ()) .leftCols(r);
}

BundleResult run_bundle(const Eigen::MatrixXd& inputs, const SpacetimeIndexMap& index, const SpMat& W,
                        const PartitionConfig& cfg) {
    BundleResult b;
    b.inputs = inputs;
    b.seba = seba(orthonormal_basis(inputs), cfg.seba);
    b.columns = detect_spurious(b.seba.S, index, W, cfg.kappa, cfg.fibre_tol, cfg.theta);
    double sum = 0.0;
    int cnt = 0;
    for (const auto& c : b.columns)
        if (c.support > 0) {
            sum += c.ratio;
            ++cnt;
        }
    b.mean_ratio = cnt ? sum / cnt : 0.0;
    return b;
}

void finish_run(PartitionRun& run, const BundleResult& b, const SpacetimeIndexMap& index,
                const PartitionConfig& cfg) {
    run.seba_inputs = b.inputs;
    run.seba = b.seba;
    run.columns = b.columns;
    run.spurious.clear();
    for (int c = 0; c < static_cast<int>(b.columns.size()); ++c)
        if (b.columns[c].spurious) run.spurious.push_back(c);
    run.packing = assign_packing(b.seba.S, b.columns, cfg.theta, &run.element_columns);
    if (run.packing.elements.empty()) run.warnings.push_back("all SEBA columns are spurious");
    run.slice_norms = slice_norms(run.vectors, index);
}

Packing whole(int n) {
    Packing p;
    p.n = n;
    p.elements.emplace_back(n);
    for (int i = 0; i < n; ++i) p.elements[0][i] = i;
    return p;
}

template <class Make>
void choose_R(PartitionRun& run, int Rcap, const PartitionConfig& cfg, Make make_bundle,
              const SpacetimeIndexMap& index) {
    std::map<int, BundleResult> cache;
    if (cfg.R) {
        run.R = std::min(*cfg.R, Rcap);
        if (run.R < *cfg.R) run.warnings.push_back("requested R exceeds the available spatial eigenvectors");
        cache.emplace(run.R, make_bundle(run.R));
        run.mean_ratios.push_back({run.R, cache.at(run.R).mean_ratio});
        run.selection = select_R(run.spatial_values, run.mean_ratios, cfg.tie_band);
        run.selection.R = run.R;
    } else {
        for (int R = 1; R <= Rcap; ++R) {
            cache.emplace(R, make_bundle(R));
            run.mean_ratios.push_back({R, cache.at(R).mean_ratio});
        }
        run.selection = select_R(run.spatial_values, run.mean_ratios, cfg.tie_band);
        run.R = run.selection.R;
    }
    run.vectors = run.vectors.leftCols(run.R).eval();
    run.eigen_indices.resize(run.R);
    finish_run(run, cache.at(run.R), index, cfg);
}

}  // namespace

PartitionRun run_multiplex(const TemporalNetwork& net, const PartitionConfig& cfg) {
    if (!net.is_multiplex()) throw ValidationError("run_multiplex needs a multiplex network");
    const int N = net.vertex_count(), T = net.slice_count(), n = N * T;
    const auto& index = net.index();
    SupraParts parts = multiplex_parts(net);
    PartitionRun run;
    if (parts.spatial.nonZeros() == 0) {
        run.packing = whole(n);
        run.element_columns = {-1};
        run.warnings.push_back("no spatial edges; the whole network is one element");
        return run;
    }
    if (cfg.a) {
        run.a = *cfg.a;
    } else if (T >= 2) {
        run.critical = critical_a_multiplex(net, cfg.bisection);
        run.a = run.critical.a;
        run.a_automatic = true;
    }
    SpMat W = combine(parts, run.a);
    int available = n - (T - 1);
    int Rcap = std::min(cfg.R ? *cfg.R : cfg.R_max, available - 1);
    if (Rcap < 1) throw ValidationError("network is too small for a nontrivial spatial eigenvector");
    int count = std::min(Rcap + 2, available);
    EigenSet es = multiplex_spatial_eigenpairs(net, run.a, count, cfg.solver);
    run.spatial_values = es.values;
    EigenSet check = classify_multiplex(es, N, T, cfg.tau_cls);
    for (int k = 0; k < check.size(); ++k)
        if (check.labels[k] != EigenLabel::Spatial)
            run.warnings.push_back("spatial eigenvector " + std::to_string(k + 1) +
                                   " fails the slice-mean test");
    Eigen::MatrixXd F = es.vectors.middleCols(1, Rcap);
    run.vectors = F;
    auto make = [&](int R) {
        Eigen::MatrixXd Fr = F.leftCols(R);
        Eigen::MatrixXd B = cfg.companions ? companion_vectors(Fr, index, cfg.companion_mode) : Fr;
        return run_bundle(B, index, W, cfg);
    };
    choose_R(run, Rcap, cfg, make, index);
    for (int k = 0; k < run.R; ++k) run.eigen_indices[k] = k + 1;
    return run;
}

PartitionRun run_nonmultiplex(const TemporalNetwork& net, const PartitionConfig& cfg) {
    const int T = net.slice_count();
    const auto& index = net.index();
    const int n = index.size();
    SupraParts parts = nonmultiplex_parts(net);
    PartitionRun run;
    if (parts.spatial.nonZeros() == 0 || n < 3) {
        run.packing = whole(n);
        run.element_columns = {-1};
        run.warnings.push_back("no spatial structure; the whole network is one element");
        return run;
    }
    if (cfg.a) {
        run.a = *cfg.a;
    } else if (parts.temporal.nonZeros() > 0) {
        run.critical = critical_a_nonmultiplex(net, cfg.bisection);
        run.a = run.critical.a;
        run.a_automatic = true;
    }
    SpMat W = combine(parts, run.a);
    SpMat L = laplacian_of(W);
    int want = (cfg.R ? *cfg.R : cfg.R_max) + 1;
    int k = cfg.eig_count > 0 ? std::min(cfg.eig_count, n) : std::min(n, want + T + 5);
    EigenSet es;
    SpatialSelection sel;
    for (;;) {
        es = smallest_eigenpairs(L, k, cfg.solver);
        es.a = run.a;
        sel = identify_spatial_nonmultiplex(es, net, want, cfg.tau_temp);
        if (!sel.incomplete || k == n || cfg.eig_count > 0) break;
        k = std::min(n, 2 * k);
    }
    run.inner_products = sel.inner;
    int found = static_cast<int>(sel.indices.size());
    if (found == 0) {
        run.packing = whole(n);
        run.element_columns = {-1};
        run.warnings.push_back("no spatial eigenvector passed the temporal inner-product test");
        return run;
    }
    run.spatial_values.resize(found + 1);
    run.spatial_values[0] = es.values[0];
    Eigen::MatrixXd F(n, found);
    for (int j = 0; j < found; ++j) {
        run.spatial_values[j + 1] = es.values[sel.indices[j]];
        F.col(j) = es.vectors.col(sel.indices[j]);
    }
    int Rcap = std::min(want - 1, found);
    if (sel.incomplete) run.warnings.push_back("fewer spatial eigenvectors than requested");
    run.vectors = F.leftCols(Rcap);
    auto make = [&](int R) { return run_bundle(F.leftCols(R), index, W, cfg); };
    choose_R(run, Rcap, cfg, make, index);
    for (int j = 0; j < run.R; ++j) run.eigen_indices[j] = sel.indices[j];
    return run;
}

std::vector<TransitionEvent> classify_transitions(const Packing& p, const SpacetimeIndexMap& index,
                                                  int max_collection) {
    if (p.n != index.size()) throw ValidationError("packing size must match the spacetime size");
    p.validate();
    const int T = index.slice_count();
    auto lab = p.labels();
    // label of (t, x); -2 when absent
    auto at = [&](int t, int x) {
        int i = index.find(t, x);
        return i < 0 ? -2 : lab[i];
    };
    auto members = [&](int t) {
        std::map<int, std::vector<int>> m;
        for (int r = 0; r < index.slice_size(t); ++r) {
            int x = index.vertex_at(t, r);
            m[lab[index.offset(t) + r]].push_back(x);
        }
        return m;
    };
    std::vector<TransitionEvent> events;
    auto test = [&](int t_from, int t_to, int pair_t, bool forward) {
        auto from = members(t_from), to = members(t_to);
        for (const auto& [A, xs] : from) {
            std::set<int> targets;
            bool ok = true;
            for (int x : xs) {
                int l = at(t_to, x);
                if (l == -2) {
                    ok = false;
                    break;
                }
                targets.insert(l);
            }
            if (!ok) continue;
            for (int B : targets)
                for (int y : to.at(B))
                    if (at(t_from, y) != A) ok = false;
            if (!ok) continue;
            int J = static_cast<int>(targets.size());
            if (J > max_collection) continue;
            TransitionEvent e;
            e.t = pair_t;
            e.J = J;
            e.actor = A;
            e.targets.assign(targets.begin(), targets.end());
            if (A >= 0) {
                bool self = targets.count(A) > 0;
                if (self && J >= 2) {
                    e.kind = forward ? TransitionEvent::Kind::Split : TransitionEvent::Kind::Merge;
                    e.shrinking = J == 2 && targets.count(-1) > 0;
                } else if (!self) {
                    e.kind = forward ? TransitionEvent::Kind::Appearance : TransitionEvent::Kind::Disappearance;
                } else {
                    continue;
                }
            } else {
                if (J < 2) continue;
                e.kind = forward ? TransitionEvent::Kind::Appearance : TransitionEvent::Kind::Disappearance;
            }
            events.push_back(e);
        }
    };
    for (int t = 0; t + 1 < T; ++t) {
        test(t, t + 1, t, true);
        test(t + 1, t, t, false);
    }
    return events;
}

}  // namespace stclust
