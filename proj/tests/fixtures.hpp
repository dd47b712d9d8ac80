#pragma once

#include "stclust/graph_core.hpp"

#include <random>
#include <utility>
#include <vector>

namespace fixtures {

using stclust::SpMat;
using stclust::TemporalNetwork;

/// Builds a symmetric layer from 1-based undirected edges.
SpMat layer(int n, const std::vector<std::tuple<int, int, double>>& edges);

/// Two vertices, two slices, edge weights 1 then 2, unit chain.
TemporalNetwork e0();

/// Five vertices over five slices: complete graphs at the ends and
/// clusters {1,2,3}, {4,5} with one bridge in slices 2 and 4.
TemporalNetwork five_slice();

/// Random multiplex net with connected layers; random_temporal picks a
/// random connected W' instead of the chain.
TemporalNetwork random_multiplex(std::mt19937_64& rng, int N, int T, bool random_temporal);

/// Random connected weighted graph on n vertices.
SpMat random_graph(std::mt19937_64& rng, int n, double p);

double uniform(std::mt19937_64& rng, double lo, double hi);

}  // namespace fixtures
