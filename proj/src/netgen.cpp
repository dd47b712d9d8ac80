#include "stclust/netgen.hpp"

#include "stclust/error.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <set>
#include <string>

namespace stclust {

namespace {

using Edge = std::pair<int, int>;

Edge ordered(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

template <class Vec>
void shuffle(Vec& v, std::mt19937_64& rng) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
        std::swap(v[i], v[uniform_index(rng, i + 1)]);
}

SpMat to_layer(int N, const std::set<Edge>& E, double w = 1.0) {
    std::vector<Triplet> trips;
    for (auto [u, v] : E) {
        trips.emplace_back(u, v, w);
        trips.emplace_back(v, u, w);
    }
    SpMat M(N, N);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

struct State {
    std::set<Edge> edges;
    std::vector<int> truth;
};

State make_state(int N, int alpha, const GenSpec& g, std::mt19937_64& rng) {
    State st;
    st.truth.assign(N, 0);
    std::vector<int> all(N);
    for (int x = 0; x < N; ++x) all[x] = x;
    if (alpha == 0) {
        int d = N / g.gamma;
        if ((N * d) % 2) --d;
        if (d >= N || d < 0) throw ValidationError("infeasible regular degree for the full graph");
        for (auto e : random_regular(all, d, rng)) st.edges.insert(ordered(e.first, e.second));
        return st;
    }
    int c = static_cast<int>(std::floor(N / (alpha + g.beta) + 1e-9));
    if (c < 2) throw ValidationError("cluster size N/(alpha+beta) is below 2");
    if (alpha * c > N) throw ValidationError("clusters do not fit in the vertex set");
    std::vector<int> rest;
    for (int x = alpha * c; x < N; ++x) rest.push_back(x);
    for (int k = 0; k < alpha; ++k)
        for (int u = k * c; u < (k + 1) * c; ++u) {
            st.truth[u] = k + 1;
            for (int v = u + 1; v < (k + 1) * c; ++v) st.edges.insert({u, v});
        }
    if (!rest.empty()) {
        int R = static_cast<int>(rest.size());
        int d = std::min(c, R);
        if ((R * d) % 2) --d;
        if (d >= R) throw ValidationError("infeasible regular degree for the remaining vertices");
        for (auto e : random_regular(rest, d, rng)) st.edges.insert(ordered(e.first, e.second));
        for (int x : rest) st.truth[x] = alpha + 1;
    }
    int inter = static_cast<int>(std::floor((1.0 - g.eta) * c + 1e-9));
    for (int k = 0; k < alpha; ++k) {
        std::vector<int> outside = rest;
        if (outside.empty())
            for (int x = 0; x < N; ++x)
                if (x < k * c || x >= (k + 1) * c) outside.push_back(x);
        std::vector<Edge> cand;
        for (int u = k * c; u < (k + 1) * c; ++u)
            for (int v : outside)
                if (!st.edges.count(ordered(u, v))) cand.push_back(ordered(u, v));
        shuffle(cand, rng);
        for (int i = 0; i < inter && i < static_cast<int>(cand.size()); ++i) st.edges.insert(cand[i]);
    }
    return st;
}

void check_spec(const GenSpec& g) {
    if (g.N < 2 || g.T < 1) throw ValidationError("generator needs N >= 2 and T >= 1");
    if (g.alpha.empty() || g.alpha.size() != g.s.size())
        throw ValidationError("alpha and s must be nonempty and of equal length");
    if (g.s.front() != 1 || g.s.back() != g.T)
        throw ValidationError("state times must start at 1 and end at T");
    for (size_t i = 0; i + 1 < g.s.size(); ++i)
        if (g.s[i + 1] <= g.s[i]) throw ValidationError("state times must be strictly increasing");
    for (int a : g.alpha)
        if (a < 0) throw ValidationError("alpha entries must be nonnegative");
    if (!(g.eta > 0 && g.eta <= 1)) throw ValidationError("eta must lie in (0, 1]");
    if (!(g.beta > 0)) throw ValidationError("beta must be positive");
    if (g.gamma < 1) throw ValidationError("gamma must be a positive integer");
}

}  // namespace

int uniform_index(std::mt19937_64& rng, int n) {
    if (n <= 0) throw ValidationError("uniform_index needs n > 0");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % un;
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    return static_cast<int>(r % un);
}

std::vector<std::pair<int, int>> random_regular(const std::vector<int>& vertices, int d,
                                                std::mt19937_64& rng) {
    const int n = static_cast<int>(vertices.size());
    if (d < 0 || d >= n || (static_cast<long>(n) * d) % 2)
        throw ValidationError("no simple " + std::to_string(d) + "-regular graph on " +
                              std::to_string(n) + " vertices");
    if (d == 0) return {};
    std::vector<int> perm(vertices);
    shuffle(perm, rng);
    std::vector<Edge> E;
    std::set<Edge> S;
    auto add = [&](int i, int j) {
        Edge e = ordered(perm[i], perm[j]);
        if (S.insert(e).second) E.push_back(e);
    };
    for (int i = 0; i < n; ++i)
        for (int k = 1; k <= d / 2; ++k) add(i, (i + k) % n);
    if (d % 2)
        for (int i = 0; i < n / 2; ++i) add(i, i + n / 2);
    // Degree-preserving double edge swaps randomise the circulant start.
    const int m = static_cast<int>(E.size());
    for (int it = 0; it < 10 * m; ++it) {
        int i = uniform_index(rng, m), j = uniform_index(rng, m);
        if (i == j) continue;
        auto [a, b] = E[i];
        auto [c, e] = E[j];
        if (uniform_index(rng, 2)) std::swap(c, e);
        if (a == e || c == b || a == c || b == e) continue;
        Edge n1 = ordered(a, e), n2 = ordered(c, b);
        if (S.count(n1) || S.count(n2)) continue;
        S.erase(E[i]);
        S.erase(E[j]);
        E[i] = n1;
        E[j] = n2;
        S.insert(n1);
        S.insert(n2);
    }
    std::sort(E.begin(), E.end());
    return E;
}

Generated generate(const GenSpec& g) {
    check_spec(g);
    std::mt19937_64 rng(g.seed);
    std::vector<State> states;
    for (int a : g.alpha) states.push_back(make_state(g.N, a, g, rng));

    std::vector<std::set<Edge>> slices(g.T);
    std::vector<std::vector<int>> truth(g.T);
    for (size_t i = 0; i < states.size(); ++i) {
        int s0 = g.s[i] - 1;
        slices[s0] = states[i].edges;
        truth[s0] = states[i].truth;
        if (i + 1 == states.size()) break;
        int s1 = g.s[i + 1] - 1, gap = s1 - s0;
        std::vector<Edge> delta;
        std::set_symmetric_difference(states[i].edges.begin(), states[i].edges.end(),
                                      states[i + 1].edges.begin(), states[i + 1].edges.end(),
                                      std::back_inserter(delta));
        shuffle(delta, rng);
        // Cumulative count floor(k |delta| / gap): every slice changes by the
        // quota ceil(|delta| / gap) or one less.
        std::set<Edge> cur = states[i].edges;
        size_t applied = 0;
        for (int k = 1; k < gap; ++k) {
            size_t upto = delta.size() * static_cast<size_t>(k) / static_cast<size_t>(gap);
            for (; applied < upto; ++applied) {
                const Edge& e = delta[applied];
                if (!cur.erase(e)) cur.insert(e);
            }
            slices[s0 + k] = cur;
            truth[s0 + k] = (2 * k <= gap) ? states[i].truth : states[i + 1].truth;
        }
    }
    std::vector<SpMat> layers;
    for (int t = 0; t < g.T; ++t) layers.push_back(to_layer(g.N, slices[t]));
    return {TemporalNetwork::multiplex(std::move(layers)), truth};
}

Generated generate_shifting(const ShiftingSpec& g) {
    if (g.T < 1 || g.cluster_size < 2 || g.starts.empty())
        throw ValidationError("invalid shifting-cluster specification");
    std::mt19937_64 rng(g.seed);
    const int cap = static_cast<int>(std::floor(g.inter_fraction / (1.0 - g.inter_fraction) * g.degree + 1e-9));
    std::vector<std::vector<int>> presence(g.T);
    std::vector<SpMat> layers;
    std::vector<std::vector<int>> truth(g.T, std::vector<int>(g.N, -1));
    for (int t = 0; t < g.T; ++t) {
        std::vector<std::vector<int>> clusters;
        for (size_t k = 0; k < g.starts.size(); ++k) {
            std::vector<int> C;
            for (int i = 0; i < g.cluster_size; ++i) {
                int x = g.starts[k] - g.shift * t + i;
                if (x < 0 || x >= g.N) throw ValidationError("cluster drifts outside the vertex superset");
                C.push_back(x);
                truth[t][x] = static_cast<int>(k) + 1;
            }
            clusters.push_back(C);
        }
        auto& P = presence[t];
        for (const auto& C : clusters) P.insert(P.end(), C.begin(), C.end());
        std::sort(P.begin(), P.end());
        if (std::adjacent_find(P.begin(), P.end()) != P.end())
            throw ValidationError("planted clusters overlap");
        std::vector<int> rank(g.N, -1);
        for (size_t r = 0; r < P.size(); ++r) rank[P[r]] = static_cast<int>(r);

        std::vector<Triplet> trips;
        std::set<Edge> used;
        for (const auto& C : clusters)
            for (auto [u, v] : random_regular(C, g.degree, rng)) {
                trips.emplace_back(rank[u], rank[v], 1.0);
                trips.emplace_back(rank[v], rank[u], 1.0);
                used.insert(ordered(u, v));
            }
        std::vector<int> inter(g.N, 0);
        double w = 1.0 / (t + 1);
        int added = 0;
        for (int attempt = 0; attempt < 100 * g.inter_edges && added < g.inter_edges; ++attempt) {
            int k1 = uniform_index(rng, static_cast<int>(clusters.size()));
            int k2 = uniform_index(rng, static_cast<int>(clusters.size()));
            if (k1 == k2) continue;
            int u = clusters[k1][uniform_index(rng, g.cluster_size)];
            int v = clusters[k2][uniform_index(rng, g.cluster_size)];
            if (inter[u] >= cap || inter[v] >= cap || used.count(ordered(u, v))) continue;
            used.insert(ordered(u, v));
            ++inter[u];
            ++inter[v];
            ++added;
            trips.emplace_back(rank[u], rank[v], w);
            trips.emplace_back(rank[v], rank[u], w);
        }
        int n = static_cast<int>(P.size());
        SpMat L(n, n);
        L.setFromTriplets(trips.begin(), trips.end());
        layers.push_back(L);
    }
    return {TemporalNetwork::nonmultiplex(g.N, presence, std::move(layers)), truth};
}

}  // namespace stclust
