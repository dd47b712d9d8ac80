#include "stclust/graph_core.hpp"

#include "stclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stclust {

namespace {

constexpr double kDropBelow = 1e-15;

void check_layer(const SpMat& L, int t, int expected) {
    if (L.rows() != expected || L.cols() != expected)
        throw ValidationError("layer " + std::to_string(t + 1) + " has size " +
                              std::to_string(L.rows()) + "x" + std::to_string(L.cols()) +
                              ", expected " + std::to_string(expected));
    SpMat Lt = L.transpose();
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it) {
            if (it.row() == it.col() && it.value() != 0.0)
                throw ValidationError("layer " + std::to_string(t + 1) + " has a nonzero diagonal");
            if (it.value() < 0.0)
                throw ValidationError("layer " + std::to_string(t + 1) + " has a negative weight");
            if (!std::isfinite(it.value()))
                throw ValidationError("layer " + std::to_string(t + 1) + " has a non-finite weight");
        }
    double asym = (L - Lt).cwiseAbs().sum();
    if (asym > 1e-12 * std::max(1.0, L.cwiseAbs().sum()))
        throw ValidationError("layer " + std::to_string(t + 1) + " is not symmetric");
}

void check_temporal(const Eigen::MatrixXd& Wp, int T) {
    if (Wp.rows() != T || Wp.cols() != T)
        throw ValidationError("temporal weight matrix must be T x T");
    for (int i = 0; i < T; ++i) {
        if (Wp(i, i) != 0.0) throw ValidationError("temporal weights have a nonzero diagonal");
        for (int j = 0; j < T; ++j) {
            if (Wp(i, j) < 0.0 || !std::isfinite(Wp(i, j)))
                throw ValidationError("temporal weights must be finite and nonnegative");
            if (std::abs(Wp(i, j) - Wp(j, i)) > 1e-12 * std::max(1.0, std::abs(Wp(i, j))))
                throw ValidationError("temporal weights are not symmetric");
        }
    }
}

SpMat from_triplets(int n, std::vector<Triplet>& trips) {
    trips.erase(std::remove_if(trips.begin(), trips.end(),
                               [](const Triplet& e) { return std::abs(e.value()) < kDropBelow; }),
                trips.end());
    SpMat M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();
    return M;
}

void append_layers(const TemporalNetwork& net, std::vector<Triplet>& trips) {
    const auto& idx = net.index();
    for (int t = 0; t < net.slice_count(); ++t) {
        const SpMat& L = net.layer(t);
        int off = idx.offset(t);
        for (int k = 0; k < L.outerSize(); ++k)
            for (SpMat::InnerIterator it(L, k); it; ++it)
                trips.emplace_back(off + static_cast<int>(it.row()), off + static_cast<int>(it.col()),
                                   it.value());
    }
}

}  // namespace

SpacetimeIndexMap::SpacetimeIndexMap(int N, const std::vector<std::vector<int>>& presence)
    : N_(N) {
    int T = static_cast<int>(presence.size());
    rank_.assign(static_cast<size_t>(T) * N, -1);
    offsets_.assign(1, 0);
    for (int t = 0; t < T; ++t) {
        const auto& P = presence[t];
        for (size_t r = 0; r < P.size(); ++r) {
            rank_[static_cast<size_t>(t) * N + P[r]] = static_cast<int>(r);
            vertices_.push_back(P[r]);
            slice_of_.push_back(t);
        }
        offsets_.push_back(offsets_.back() + static_cast<int>(P.size()));
        if (static_cast<int>(P.size()) != N) multiplex_ = false;
    }
}

int SpacetimeIndexMap::find(int t, int x) const {
    if (t < 0 || t >= slice_count() || x < 0 || x >= N_) return -1;
    int r = rank_[static_cast<size_t>(t) * N_ + x];
    return r < 0 ? -1 : offsets_[t] + r;
}

int SpacetimeIndexMap::encode(int t, int x) const {
    int i = find(t, x);
    if (i < 0)
        throw ValidationError("spacetime vertex (" + std::to_string(t + 1) + "," +
                              std::to_string(x + 1) + ") is not present");
    return i;
}

std::pair<int, int> SpacetimeIndexMap::decode(int i) const {
    if (i < 0 || i >= size()) throw ValidationError("spacetime index out of range");
    return {slice_of_[i], vertices_[i]};
}

TemporalNetwork TemporalNetwork::multiplex(std::vector<SpMat> layers,
                                           std::optional<Eigen::MatrixXd> temporal) {
    if (layers.empty()) throw ValidationError("network needs at least one slice");
    int N = static_cast<int>(layers[0].rows());
    if (N == 0) throw ValidationError("network needs at least one vertex");
    int T = static_cast<int>(layers.size());
    std::vector<int> all(N);
    for (int x = 0; x < N; ++x) all[x] = x;
    std::vector<std::vector<int>> presence(T, all);
    TemporalNetwork net = nonmultiplex(N, std::move(presence), std::move(layers));
    if (temporal) {
        check_temporal(*temporal, T);
        net.temporal_ = *temporal;
        net.chain_ = (*temporal == chain_weights(T));
    }
    return net;
}

TemporalNetwork TemporalNetwork::nonmultiplex(int N, std::vector<std::vector<int>> presence,
                                              std::vector<SpMat> layers) {
    if (N <= 0) throw ValidationError("vertex superset must be nonempty");
    if (presence.empty()) throw ValidationError("network needs at least one slice");
    if (presence.size() != layers.size())
        throw ValidationError("presence and layer counts differ");
    int T = static_cast<int>(presence.size());
    for (int t = 0; t < T; ++t) {
        auto& P = presence[t];
        if (P.empty()) throw ValidationError("slice " + std::to_string(t + 1) + " is empty");
        std::sort(P.begin(), P.end());
        if (std::adjacent_find(P.begin(), P.end()) != P.end())
            throw ValidationError("slice " + std::to_string(t + 1) + " lists a vertex twice");
        if (P.front() < 0 || P.back() >= N)
            throw ValidationError("slice " + std::to_string(t + 1) + " has a vertex outside 1..N");
        check_layer(layers[t], t, static_cast<int>(P.size()));
        layers[t].prune(kDropBelow, 1.0);
        layers[t].makeCompressed();
    }
    TemporalNetwork net;
    net.N_ = N;
    net.layers_ = std::move(layers);
    net.presence_ = std::move(presence);
    net.temporal_ = chain_weights(T);
    net.chain_ = true;
    net.index_ = SpacetimeIndexMap(N, net.presence_);
    return net;
}

SpMat TemporalNetwork::layer_full(int t) const {
    std::vector<Triplet> trips;
    const SpMat& L = layers_[t];
    const auto& P = presence_[t];
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it)
            trips.emplace_back(P[it.row()], P[it.col()], it.value());
    SpMat M(N_, N_);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

double DegreeData::volume(const std::vector<int>& X) const {
    double v = 0.0;
    for (int i : X) {
        if (i < 0 || i >= total.size()) throw ValidationError("vertex out of range");
        v += total[i];
    }
    return v;
}

Eigen::MatrixXd chain_weights(int T) {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(T, T);
    for (int t = 0; t + 1 < T; ++t) W(t, t + 1) = W(t + 1, t) = 1.0;
    return W;
}

SupraParts multiplex_parts(const TemporalNetwork& net) {
    if (!net.is_multiplex()) throw ValidationError("network is not multiplex");
    int N = net.vertex_count(), T = net.slice_count(), n = N * T;
    std::vector<Triplet> sp, tp;
    append_layers(net, sp);
    const auto& Wp = net.temporal_weights();
    for (int t = 0; t < T; ++t)
        for (int s = 0; s < T; ++s)
            if (s != t && Wp(t, s) != 0.0)
                for (int x = 0; x < N; ++x) tp.emplace_back(N * t + x, N * s + x, Wp(t, s));
    return {from_triplets(n, sp), from_triplets(n, tp)};
}

SupraParts nonmultiplex_parts(const TemporalNetwork& net) {
    if (!net.chain_temporal())
        throw ValidationError("non-multiplex assembly supports only the unit chain temporal coupling");
    const auto& idx = net.index();
    int n = idx.size();
    std::vector<Triplet> sp, tp;
    append_layers(net, sp);
    for (int t = 0; t + 1 < net.slice_count(); ++t)
        for (int x : net.present(t)) {
            int j = idx.find(t + 1, x);
            if (j < 0) continue;
            int i = idx.find(t, x);
            tp.emplace_back(i, j, 1.0);
            tp.emplace_back(j, i, 1.0);
        }
    return {from_triplets(n, sp), from_triplets(n, tp)};
}

SpMat combine(const SupraParts& parts, double a) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError("a must be finite and nonnegative");
    SpMat M = parts.spatial + (a * a) * parts.temporal;
    M.prune(kDropBelow, 1.0);
    M.makeCompressed();
    return M;
}

SupraMatrix build_multiplex_adjacency(const TemporalNetwork& net, double a) {
    return {combine(multiplex_parts(net), a), MatrixKind::Adjacency, a};
}

SupraMatrix build_nonmultiplex_adjacency(const TemporalNetwork& net, double a) {
    return {combine(nonmultiplex_parts(net), a), MatrixKind::Adjacency, a};
}

SpMat laplacian_of(const SpMat& W) {
    int n = static_cast<int>(W.rows());
    Eigen::VectorXd d = W * Eigen::VectorXd::Ones(n);
    SpMat D(n, n);
    std::vector<Triplet> diag;
    for (int i = 0; i < n; ++i) diag.emplace_back(i, i, d[i]);
    D.setFromTriplets(diag.begin(), diag.end());
    SpMat L = D - W;
    L.makeCompressed();
    return L;
}

SupraMatrix assemble_laplacian(const SupraMatrix& W, bool normalised) {
    if (W.kind != MatrixKind::Adjacency) throw ValidationError("expected an adjacency matrix");
    int n = W.size();
    if (!normalised) return {laplacian_of(W.matrix), MatrixKind::Laplacian, W.a};
    Eigen::VectorXd d = W.matrix * Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i)
        if (!(d[i] > 0.0))
            throw ValidationError("isolated vertex " + std::to_string(i + 1) +
                                  " (normalised Laplacian needs positive degrees)");
    Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
    SpMat M = -(s.asDiagonal() * W.matrix * s.asDiagonal());
    SpMat I(n, n);
    I.setIdentity();
    M += I;
    M.makeCompressed();
    return {M, MatrixKind::NormalisedLaplacian, W.a};
}

SpMat dynamic_laplacian(const TemporalNetwork& net) {
    if (!net.is_multiplex())
        throw ValidationError("dynamic Laplacian needs a multiplex network");
    int N = net.vertex_count(), T = net.slice_count();
    SpMat WD(N, N);
    for (int t = 0; t < T; ++t) WD += net.layer(t);
    WD *= 1.0 / T;
    return laplacian_of(WD);
}

DegreeData degrees(const SupraMatrix& W, const TemporalNetwork& net, double a) {
    int n = W.size();
    if (n != net.spacetime_size()) throw ValidationError("matrix and network dimensions differ");
    SupraParts parts = net.is_multiplex() ? multiplex_parts(net) : nonmultiplex_parts(net);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    DegreeData dd;
    dd.total = W.matrix * ones;
    dd.spatial = parts.spatial * ones;
    dd.temporal = parts.temporal * ones;
    dd.temporal_slice = net.temporal_weights().rowwise().sum();
    if ((dd.total - dd.spatial - a * a * dd.temporal).cwiseAbs().maxCoeff() >
        1e-9 * std::max(1.0, dd.total.cwiseAbs().maxCoeff()))
        throw ValidationError("adjacency does not match the network at the given a");
    return dd;
}

std::vector<Triplet> to_triplets(const SpMat& M) {
    std::vector<Triplet> out;
    out.reserve(M.nonZeros());
    for (int k = 0; k < M.outerSize(); ++k)
        for (SpMat::InnerIterator it(M, k); it; ++it)
            out.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    return out;
}

}  // namespace stclust
