#pragma once

#include "stclust/cheeger.hpp"
#include "stclust/graph_core.hpp"

#include <vector>

namespace stclust {

/// Clusters of one slice as lists of superset vertex ids (0-based), plus an
/// optional unclustered set.
struct SlicePartition {
    std::vector<std::vector<int>> clusters;
    std::vector<int> omega;
};

/// Max-weight assignment of every row of a (rows <= cols) matrix to a
/// distinct column. Returns the column per row.
std::vector<int> hungarian_max(const Eigen::MatrixXd& C);

struct CoverInstance {
    /// K_t x K_{t+1}; entry (i,j) is -a^2 times the temporal weight between cluster i at t and j at t+1.
    Eigen::MatrixXd C;
};

/// Cover weights between consecutive slices t and t+1 (0-based t).
/// Omega, when nonempty, is appended as the last cluster.
CoverInstance slice_cut_matrix(const SlicePartition& Pt, const SlicePartition& Pt1,
                               const TemporalNetwork& net, double a, int t);

struct CoverResult {
    /// Binary K_t x K_{t+1} assignment.
    Eigen::MatrixXi A;
    double total = 0.0;
};

/// Restricted maximum-weight edge cover: the larger side gets exactly one
/// incident edge, the smaller side at least one.
CoverResult rmwec(const Eigen::MatrixXd& C);

struct LinkEvent {
    int t = 0;              ///< 0-based slice of the earlier side
    bool merge = false;     ///< false means split
    std::vector<int> from;  ///< global labels on the earlier side
    std::vector<int> to;    ///< global labels on the later side
};

struct LinkResult {
    Packing packing;
    /// Global label per cluster per slice (Omega excluded).
    std::vector<std::vector<int>> labels;
    std::vector<LinkEvent> events;
    int K = 0;
};

/// Left-to-right sweep linking slice partitions into spacetime elements.
LinkResult link_partitions(const std::vector<SlicePartition>& seq, const TemporalNetwork& net, double a);

/// a^2 times the number of temporal edges whose ends carry different labels.
/// Labels are per spacetime vertex, -1 for unclustered.
double temporal_cut(const std::vector<int>& labels, const TemporalNetwork& net, double a);

}  // namespace stclust
