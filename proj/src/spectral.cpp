#include "stclust/spectral.hpp"

#include "stclust/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace stclust {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double row_abs_max(const SpMat& L) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(L.rows());
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it) r[it.row()] += std::abs(it.value());
    return r.size() ? r.maxCoeff() : 0.0;
}

double uniform_pm1(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

struct ShiftInvert {
    Eigen::SimplicialLDLT<SpMat> ldlt;

    ShiftInvert(const SpMat& L, double sigma) {
        SpMat A = L;
        for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) -= sigma;
        A.makeCompressed();
        ldlt.compute(A);
        if (ldlt.info() != Eigen::Success) throw NumericalError("shift-invert factorisation failed");
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& v) const { return ldlt.solve(v); }
};

struct RitzPair {
    double value;
    Eigen::VectorXd vector;
    bool converged;
};

class LanczosDriver {
public:
    LanczosDriver(const SpMat& L, const Projector* P, const SolverOptions& opt)
        : L_(L), P_(P), opt_(opt), op_(L, opt.shift), rng_(opt.seed), normL_(row_abs_max(L)) {}

    EigenSet run(int k) {
        const int n = static_cast<int>(L_.rows());
        int max_dim = std::min(n, std::max(opt_.max_iter, 2 * k + 20));
        Eigen::MatrixXd locked(n, 0);
        std::vector<double> locked_vals;
        for (int round = 0; round < 10 * k + 50; ++round) {
            int have = static_cast<int>(locked_vals.size());
            int want = std::max(1, k - have);
            bool exhausted = false;
            auto pairs = lanczos_round(locked, want, max_dim, exhausted);
            if (exhausted) break;
            double kth = std::numeric_limits<double>::infinity();
            if (have >= k) {
                std::vector<double> s = locked_vals;
                std::nth_element(s.begin(), s.begin() + (k - 1), s.end());
                kth = s[k - 1];
            }
            int added = 0;
            for (const auto& p : pairs) {
                if (!p.converged) break;
                if (have >= k && p.value >= kth - opt_.tol * std::max(1.0, std::abs(kth))) break;
                if (have < k && added >= want) break;
                locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
                locked.col(locked.cols() - 1) = p.vector;
                locked_vals.push_back(p.value);
                ++added;
            }
            if (have >= k && added == 0 && !pairs.empty() && pairs.front().converged) break;
            if (added == 0) {
                if (max_dim >= n) throw NumericalError("Lanczos did not converge");
                max_dim = std::min(n, 2 * max_dim);
            }
        }
        if (static_cast<int>(locked_vals.size()) < k)
            throw NumericalError("Lanczos found fewer eigenpairs than requested");

        Eigen::HouseholderQR<Eigen::MatrixXd> qr(locked);
        Eigen::MatrixXd Y = qr.householderQ() * Eigen::MatrixXd::Identity(n, locked.cols());
        Eigen::MatrixXd H = Y.transpose() * (L_ * Y);
        H = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        EigenSet out;
        out.values = es.eigenvalues().head(k);
        out.vectors = Y * es.eigenvectors().leftCols(k);
        return out;
    }

private:
    void clean(Eigen::Ref<Eigen::VectorXd> w, const Eigen::MatrixXd& locked) const {
        if (P_) (*P_)(w);
        if (locked.cols()) {
            w -= locked * (locked.transpose() * w);
            w -= locked * (locked.transpose() * w);
        }
    }

    std::vector<RitzPair> lanczos_round(const Eigen::MatrixXd& locked, int want, int max_dim,
                                        bool& exhausted) {
        const int n = static_cast<int>(L_.rows());
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform_pm1(rng_);
        clean(v, locked);
        double nv = v.norm();
        if (nv < 1e-10) {
            exhausted = true;
            return {};
        }
        v /= nv;

        Eigen::MatrixXd V(n, max_dim);
        std::vector<double> alpha, beta;
        Eigen::MatrixXd S;
        Eigen::VectorXd theta;
        int m = 0;
        double beta_last = 0.0;
        for (int j = 0; j < max_dim; ++j) {
            V.col(j) = v;
            Eigen::VectorXd w = op_.solve(v);
            clean(w, locked);
            double aj = w.dot(v);
            w -= aj * v;
            if (j > 0) w -= beta.back() * V.col(j - 1);
            for (int pass = 0; pass < 2; ++pass) {
                w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
                clean(w, locked);
            }
            alpha.push_back(aj);
            double bj = w.norm();
            m = j + 1;
            beta_last = bj;
            bool breakdown = bj <= 1e-13 * std::max(1.0, std::abs(aj));
            bool check = breakdown || m == max_dim || (m >= want && (m % 5 == 0));
            if (check) {
                Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
                Eigen::VectorXd sub(std::max(0, m - 1));
                for (int i = 0; i + 1 < m; ++i) sub[i] = beta[i];
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
                tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
                theta = tri.eigenvalues();
                S = tri.eigenvectors();
                // Largest theta <-> smallest eigenvalue of L.
                int ok = 0;
                for (int i = m - 1; i >= 0 && ok < want; --i) {
                    double th = theta[i];
                    if (th <= 0) break;
                    double lam = opt_.shift + 1.0 / th;
                    double est = breakdown ? 0.0 : bj * std::abs(S(m - 1, i));
                    double need = 0.1 * opt_.tol * std::max(1.0, std::abs(lam)) * th /
                                  std::max(1.0, normL_ + std::abs(opt_.shift));
                    if (est > need) break;
                    ++ok;
                }
                if (breakdown || ok >= std::min(want, m) || m == max_dim) break;
            }
            beta.push_back(bj);
            v = w / bj;
        }
        (void)beta_last;

        std::vector<RitzPair> out;
        int take = std::min(m, want + 2);
        for (int c = 0; c < take; ++c) {
            int i = m - 1 - c;
            if (theta[i] <= 0) break;
            Eigen::VectorXd y = V.leftCols(m) * S.col(i);
            clean(y, locked);
            y.normalize();
            Eigen::VectorXd Ly = L_ * y;
            double lam = y.dot(Ly);
            double res = (Ly - lam * y).norm();
            double bound = std::max(opt_.tol * std::max(1.0, std::abs(lam)), 1e3 * kEps * normL_);
            out.push_back({lam, y, res <= bound});
        }
        std::stable_sort(out.begin(), out.end(),
                         [](const RitzPair& a, const RitzPair& b) { return a.value < b.value; });
        return out;
    }

    const SpMat& L_;
    const Projector* P_;
    SolverOptions opt_;
    ShiftInvert op_;
    std::mt19937_64 rng_;
    double normL_;
};

// V'LV from edge differences: x'Ly = sum_{i<j} -L_ij (x_i - x_j)(y_i - y_j) + sum_i r_i x_i y_i
// with r the row sums. Large weights (a^2 L') then act on small differences
// directly, which keeps the small eigenvalues accurate to rounding level.
Eigen::MatrixXd difference_form(const SpMat& L, const Eigen::MatrixXd& V) {
    const int k = static_cast<int>(V.cols());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(L.rows());
    for (int c = 0; c < L.outerSize(); ++c)
        for (SpMat::InnerIterator it(L, c); it; ++it) {
            r[it.row()] += it.value();
            if (it.row() < it.col()) {
                Eigen::RowVectorXd d = V.row(it.row()) - V.row(it.col());
                M.noalias() -= it.value() * d.transpose() * d;
            }
        }
    M.noalias() += V.transpose() * r.asDiagonal() * V;
    return 0.5 * (M + M.transpose());
}

void rayleigh_ritz(EigenSet& es, const SpMat& L) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(difference_form(L, es.vectors));
    es.vectors = es.vectors * s.eigenvectors();
    es.values = s.eigenvalues();
}

void finish(EigenSet& es, const SpMat& L) {
    rayleigh_ritz(es, L);
    fix_signs(es.vectors);
    es.labels.assign(es.values.size(), EigenLabel::Unclassified);
    double worst = 0.0;
    for (int j = 0; j < es.vectors.cols(); ++j) {
        double lam = es.values[j];
        double r = (L * es.vectors.col(j) - lam * es.vectors.col(j)).norm() / std::max(1.0, std::abs(lam));
        worst = std::max(worst, r);
    }
    es.residual = worst;
}

void check_k(const SpMat& L, int k) {
    if (L.rows() != L.cols()) throw ValidationError("matrix must be square");
    if (k < 1 || k > L.rows()) throw ValidationError("eigenpair count must be in 1..n");
}

}  // namespace

std::string to_string(EigenLabel l) {
    switch (l) {
        case EigenLabel::Spatial: return "spatial";
        case EigenLabel::Temporal: return "temporal";
        default: return "unclassified";
    }
}

void fix_signs(Eigen::MatrixXd& V) {
    for (int j = 0; j < V.cols(); ++j) {
        double mx = V.col(j).cwiseAbs().maxCoeff();
        for (int i = 0; i < V.rows(); ++i)
            if (std::abs(V(i, j)) >= mx * (1.0 - 1e-12)) {
                if (V(i, j) < 0) V.col(j) = -V.col(j);
                break;
            }
    }
}

EigenSet smallest_eigenpairs(const SpMat& L, int k, const SolverOptions& opt) {
    check_k(L, k);
    EigenSet es;
    if (L.rows() <= opt.dense_limit) {
        Eigen::MatrixXd D = Eigen::MatrixXd(L);
        D = 0.5 * (D + D.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(D);
        if (s.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
        es.values = s.eigenvalues().head(k);
        es.vectors = s.eigenvectors().leftCols(k);
    } else {
        es = LanczosDriver(L, nullptr, opt).run(k);
    }
    finish(es, L);
    return es;
}

EigenSet smallest_eigenpairs_restricted(const SpMat& L, int k, const Projector& project,
                                        const Eigen::MatrixXd& dense_complement,
                                        const SolverOptions& opt) {
    check_k(L, k);
    EigenSet es;
    if (L.rows() <= opt.dense_limit && dense_complement.rows() == L.rows()) {
        double c = 2.0 * row_abs_max(L) + 1.0;
        Eigen::MatrixXd D = Eigen::MatrixXd(L) + c * dense_complement;
        D = 0.5 * (D + D.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(D);
        if (s.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
        es.values = s.eigenvalues().head(k);
        es.vectors = s.eigenvectors().leftCols(k);
        for (int j = 0; j < k; ++j) {
            project(es.vectors.col(j));
            es.vectors.col(j).normalize();
        }
    } else {
        es = LanczosDriver(L, &project, opt).run(k);
    }
    finish(es, L);
    return es;
}

void remove_temporal(Eigen::Ref<Eigen::VectorXd> v, int N, int T) {
    Eigen::Map<Eigen::MatrixXd> M(v.data(), N, T);
    Eigen::RowVectorXd sums = M.colwise().sum();
    double mean = sums.mean();
    for (int t = 0; t < T; ++t) M.col(t).array() -= (sums[t] - mean) / N;
}

Eigen::MatrixXd temporal_projector(int N, int T) {
    int n = N * T;
    Eigen::MatrixXd P(n, n);
    for (int t = 0; t < T; ++t)
        for (int s = 0; s < T; ++s)
            P.block(t * N, s * N, N, N).setConstant(((t == s ? 1.0 : 0.0) - 1.0 / T) / N);
    return P;
}

EigenSet classify_multiplex(EigenSet es, int N, int T, double tau) {
    int n = N * T;
    if (es.vectors.rows() != n) throw ValidationError("eigenvector length must be N*T");
    int k = es.size();
    auto project_temporal = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd r = y;
        remove_temporal(r, N, T);
        return Eigen::VectorXd(y - r);
    };
    for (int g0 = 0; g0 < k;) {
        int g1 = g0 + 1;
        while (g1 < k && std::abs(es.values[g1] - es.values[g0]) <=
                             1e-8 * std::max(1.0, std::abs(es.values[g0])))
            ++g1;
        if (g1 - g0 > 1) {
            Eigen::MatrixXd Y = es.vectors.middleCols(g0, g1 - g0);
            Eigen::MatrixXd PY(n, Y.cols());
            for (int j = 0; j < Y.cols(); ++j) PY.col(j) = project_temporal(Y.col(j));
            Eigen::MatrixXd M = Y.transpose() * PY;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(0.5 * (M + M.transpose()));
            Eigen::MatrixXd R = Y * s.eigenvectors();
            fix_signs(R);
            es.vectors.middleCols(g0, g1 - g0) = R;
        }
        g0 = g1;
    }
    es.labels.assign(k, EigenLabel::Unclassified);
    for (int j = 0; j < k; ++j) {
        Eigen::Map<const Eigen::MatrixXd> F(es.vectors.col(j).data(), N, T);
        double norm2 = es.vectors.col(j).squaredNorm();
        Eigen::RowVectorXd means = F.colwise().mean();
        double var = (means.array() - means.mean()).square().mean();
        if (var <= tau * norm2 / n) {
            es.labels[j] = EigenLabel::Spatial;
            continue;
        }
        double within = 0.0;
        for (int t = 0; t < T; ++t) within += (F.col(t).array() - means[t]).square().sum();
        if (within <= tau * norm2) es.labels[j] = EigenLabel::Temporal;
    }
    return es;
}

namespace {

EigenSet spatial_pairs(const SupraParts& parts, int N, int T, double a, int count,
                       const SolverOptions& opt, const Eigen::MatrixXd* complement) {
    SpMat L = laplacian_of(combine(parts, a));
    Projector P = [N, T](Eigen::Ref<Eigen::VectorXd> v) { remove_temporal(v, N, T); };
    Eigen::MatrixXd empty;
    EigenSet es = smallest_eigenpairs_restricted(L, count, P, complement ? *complement : empty, opt);
    es.a = a;
    es.labels.assign(count, EigenLabel::Spatial);
    return es;
}

Eigen::MatrixXd complement_if_dense(int N, int T, const SolverOptions& opt) {
    int n = N * T;
    if (n > opt.dense_limit) return {};
    return temporal_projector(N, T);
}

}  // namespace

EigenSet multiplex_spatial_eigenpairs(const TemporalNetwork& net, double a, int count,
                                      const SolverOptions& opt) {
    int N = net.vertex_count(), T = net.slice_count();
    if (count < 1 || count > N * T - (T - 1))
        throw ValidationError("spatial eigenpair count out of range");
    SupraParts parts = multiplex_parts(net);
    Eigen::MatrixXd C = complement_if_dense(N, T, opt);
    return spatial_pairs(parts, N, T, a, count, opt, C.size() ? &C : nullptr);
}

CriticalA critical_a_multiplex(const TemporalNetwork& net, const BisectionOptions& opt) {
    int N = net.vertex_count(), T = net.slice_count();
    if (T < 2) throw ValidationError("critical a needs at least two slices");
    if (!(opt.lo > 0 && opt.hi > opt.lo)) throw ValidationError("invalid a bracket");
    SupraParts parts = multiplex_parts(net);
    if (parts.spatial.nonZeros() == 0) return {0.0, 0.0, 0.0, 0};
    Eigen::MatrixXd Lp = Eigen::MatrixXd(laplacian_of(net.temporal_weights().sparseView()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts(Lp, Eigen::EigenvaluesOnly);
    double sigma2 = ts.eigenvalues()[1];
    if (!(sigma2 > 1e-14)) throw ValidationError("temporal coupling graph is disconnected");

    Eigen::MatrixXd C = complement_if_dense(N, T, opt.solver);
    const Eigen::MatrixXd* Cp = C.size() ? &C : nullptr;
    CriticalA res;
    auto f = [&](double a, double& spat) {
        spat = spatial_pairs(parts, N, T, a, 2, opt.solver, Cp).values[1];
        ++res.iterations;
        return spat - a * a * sigma2;
    };
    double lo = opt.lo, hi = opt.hi, s_lo = 0, s_hi = 0;
    double f_lo = f(lo, s_lo);
    for (int e = 0; f_lo <= 0 && e < opt.max_expand; ++e) {
        lo /= 10;
        f_lo = f(lo, s_lo);
    }
    if (f_lo <= 0) throw NumericalError("no spatial/temporal crossing above the lower bracket");
    double f_hi = f(hi, s_hi);
    for (int e = 0; f_hi > 0 && e < opt.max_expand; ++e) {
        hi *= 10;
        f_hi = f(hi, s_hi);
    }
    if (f_hi > 0) throw NumericalError("no spatial/temporal crossing below the upper bracket");
    for (int it = 0; it < opt.max_iter && hi / lo - 1.0 > opt.rel_tol; ++it) {
        double mid = std::sqrt(lo * hi), s_mid = 0;
        if (f(mid, s_mid) <= 0) {
            hi = mid;
            s_hi = s_mid;
        } else {
            lo = mid;
        }
    }
    res.a = hi;
    res.spatial = s_hi;
    res.temporal = hi * hi * sigma2;
    return res;
}

SpatialSelection identify_spatial_nonmultiplex(const EigenSet& es, const TemporalNetwork& net,
                                               int R, double tau_temp) {
    const auto& idx = net.index();
    int N = net.vertex_count(), T = net.slice_count();
    if (es.vectors.rows() != idx.size()) throw ValidationError("eigenvector length must be N'");
    Eigen::MatrixXd Lc = Eigen::MatrixXd(laplacian_of(chain_weights(T).sparseView()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cs(Lc);
    const Eigen::MatrixXd& f = cs.eigenvectors();
    SpatialSelection sel;
    sel.inner.resize(es.size());
    for (int k = 0; k < es.size(); ++k) {
        const auto col = es.vectors.col(k);
        Eigen::VectorXd sums = Eigen::VectorXd::Zero(T);
        for (int i = 0; i < idx.size(); ++i) sums[idx.decode(i).first] += col[i];
        double nrm = col.norm();
        Eigen::VectorXd ip = (f.transpose() * sums) / (std::sqrt(static_cast<double>(N)) * nrm);
        sel.inner[k] = ip.cwiseAbs().maxCoeff();
    }
    for (int k = 1; k < es.size() && static_cast<int>(sel.indices.size()) < R; ++k)
        if (sel.inner[k] < tau_temp) sel.indices.push_back(k);
    sel.incomplete = static_cast<int>(sel.indices.size()) < R;
    return sel;
}

CriticalA critical_a_nonmultiplex(const TemporalNetwork& net, const BisectionOptions& opt) {
    if (!(opt.lo > 0 && opt.hi > opt.lo)) throw ValidationError("invalid a bracket");
    SupraParts parts = nonmultiplex_parts(net);
    if (parts.spatial.nonZeros() == 0 || parts.temporal.nonZeros() == 0) return {0.0, 0.0, 0.0, 0};
    if (net.spacetime_size() < 2) return {0.0, 0.0, 0.0, 0};
    SpMat Ls = laplacian_of(parts.spatial), Lt = laplacian_of(parts.temporal);
    CriticalA res;
    auto g = [&](double a, double& sp, double& tm) {
        SpMat L = Ls + (a * a) * Lt;
        EigenSet es = smallest_eigenpairs(L, 2, opt.solver);
        Eigen::VectorXd F = es.vectors.col(1);
        sp = F.dot(Ls * F);
        tm = a * a * F.dot(Lt * F);
        ++res.iterations;
        return sp - tm;
    };
    double lo = opt.lo, hi = opt.hi, sl, tl, sh, th;
    double g_lo = g(lo, sl, tl);
    for (int e = 0; g_lo >= 0 && e < opt.max_expand; ++e) {
        lo /= 10;
        g_lo = g(lo, sl, tl);
    }
    double g_hi = g(hi, sh, th);
    for (int e = 0; g_hi <= 0 && e < opt.max_expand; ++e) {
        hi *= 10;
        g_hi = g(hi, sh, th);
    }
    if (g_lo >= 0 || g_hi <= 0) throw NumericalError("Rayleigh balance has no sign change in bracket");
    for (int it = 0; it < opt.max_iter && hi / lo - 1.0 > opt.rel_tol; ++it) {
        double mid = std::sqrt(lo * hi), sm, tmid;
        double gm = g(mid, sm, tmid);
        if (gm < 0) {
            lo = mid, g_lo = gm, sl = sm, tl = tmid;
        } else {
            hi = mid, g_hi = gm, sh = sm, th = tmid;
        }
    }
    if (std::abs(g_lo) < std::abs(g_hi)) return {lo, sl, tl, res.iterations};
    return {hi, sh, th, res.iterations};
}

}  // namespace stclust
