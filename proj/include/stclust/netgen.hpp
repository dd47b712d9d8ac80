#pragma once

#include "stclust/graph_core.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace stclust {

/// Planted cluster states at given slices with smooth interpolation between them.
struct GenSpec {
    int N = 20;
    int T = 21;
    std::vector<int> alpha{0, 1};
    /// 1-based state slices; first is 1 and last is T.
    std::vector<int> s{1, 21};
    double eta = 0.8;
    double beta = 1.5;
    int gamma = 3;
    std::uint64_t seed = 7;
};

struct Generated {
    TemporalNetwork net;
    /// truth[t][x]: -1 absent, 0 unclustered, k >= 1 planted group k. The
    /// regular remainder of a clustered state is its own group alpha+1.
    std::vector<std::vector<int>> truth;
};

Generated generate(const GenSpec& spec);

/// Two planted clusters that drift through a larger vertex superset; vertices
/// outside both clusters are absent. Intercluster weights decay as 1/t.
struct ShiftingSpec {
    int N = 225;
    int T = 11;
    int cluster_size = 25;
    int shift = 5;
    /// 0-based first vertex of each cluster at the first slice.
    std::vector<int> starts{50, 150};
    int degree = 16;
    /// Upper bound on the intercluster share of any vertex's edges.
    double inter_fraction = 0.2;
    int inter_edges = 50;
    std::uint64_t seed = 11;
};

Generated generate_shifting(const ShiftingSpec& spec);

/// Deterministic integer in [0, n) from a 64-bit engine (portable across libraries).
int uniform_index(std::mt19937_64& rng, int n);

/// Random simple d-regular graph on `vertices` (edge pairs in those ids).
std::vector<std::pair<int, int>> random_regular(const std::vector<int>& vertices, int d,
                                                std::mt19937_64& rng);

}  // namespace stclust
