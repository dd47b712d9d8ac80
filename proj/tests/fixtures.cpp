#include "fixtures.hpp"

#include "stclust/netgen.hpp"

#include <tuple>

namespace fixtures {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

SpMat layer(int n, const std::vector<std::tuple<int, int, double>>& edges) {
    std::vector<stclust::Triplet> trips;
    for (auto [x, y, w] : edges) {
        trips.emplace_back(x - 1, y - 1, w);
        trips.emplace_back(y - 1, x - 1, w);
    }
    SpMat M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

TemporalNetwork e0() {
    return TemporalNetwork::multiplex({layer(2, {{1, 2, 1.0}}), layer(2, {{1, 2, 2.0}})});
}

TemporalNetwork five_slice() {
    std::vector<std::tuple<int, int, double>> k5;
    for (int x = 1; x <= 5; ++x)
        for (int y = x + 1; y <= 5; ++y) k5.emplace_back(x, y, 1.0);
    std::vector<std::tuple<int, int, double>> base{{1, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}, {4, 5, 1.0}};
    auto with = [&](int x, int y) {
        auto e = base;
        e.emplace_back(x, y, 1.0);
        return e;
    };
    return TemporalNetwork::multiplex(
        {layer(5, k5), layer(5, with(1, 5)), layer(5, base), layer(5, with(3, 4)), layer(5, k5)});
}

SpMat random_graph(std::mt19937_64& rng, int n, double p) {
    std::vector<std::tuple<int, int, double>> edges;
    // A random spanning path keeps the graph connected.
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i + 1;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[stclust::uniform_index(rng, i + 1)]);
    std::vector<std::vector<char>> has(n + 1, std::vector<char>(n + 1, 0));
    for (int i = 0; i + 1 < n; ++i) {
        int x = perm[i], y = perm[i + 1];
        edges.emplace_back(x, y, uniform(rng, 0.2, 2.0));
        has[x][y] = has[y][x] = 1;
    }
    for (int x = 1; x <= n; ++x)
        for (int y = x + 1; y <= n; ++y)
            if (!has[x][y] && uniform(rng, 0, 1) < p) edges.emplace_back(x, y, uniform(rng, 0.2, 2.0));
    return layer(n, edges);
}

TemporalNetwork random_multiplex(std::mt19937_64& rng, int N, int T, bool random_temporal) {
    std::vector<SpMat> layers;
    for (int t = 0; t < T; ++t) layers.push_back(random_graph(rng, N, 0.3));
    if (!random_temporal || T < 2) return TemporalNetwork::multiplex(std::move(layers));
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(T, T);
    for (int t = 0; t + 1 < T; ++t) W(t, t + 1) = W(t + 1, t) = uniform(rng, 0.5, 1.5);
    for (int t = 0; t < T; ++t)
        for (int s = t + 2; s < T; ++s)
            if (uniform(rng, 0, 1) < 0.3) W(t, s) = W(s, t) = uniform(rng, 0.1, 1.0);
    return TemporalNetwork::multiplex(std::move(layers), W);
}

}  // namespace fixtures
