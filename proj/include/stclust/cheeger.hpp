#pragma once

#include "stclust/graph_core.hpp"

#include <vector>

namespace stclust {

/// Disjoint spacetime vertex subsets plus the unclustered remainder.
/// Vertices are flattened spacetime indices in 0..n-1.
struct Packing {
    int n = 0;
    std::vector<std::vector<int>> elements;
    std::vector<int> omega;

    int K() const { return static_cast<int>(elements.size()); }
    bool fully_clustered() const { return omega.empty(); }
    /// Element index per vertex, -1 for omega.
    std::vector<int> labels() const;
    /// Throws ValidationError unless elements and omega partition 0..n-1.
    void validate() const;
    /// Builds from per-vertex labels in -1..K-1; empty labels are dropped.
    static Packing from_labels(const std::vector<int>& labels);
};

double cut_value(const std::vector<int>& X, const SpMat& W);
double cheeger_ratio(const std::vector<int>& X, const SpMat& W, bool normalised);
double packing_score(const Packing& p, const SpMat& W, bool normalised, bool include_omega = false);

struct BruteForceResult {
    double h = 0.0;
    Packing packing;
};

/// Exact h_K over all K-packings with nonempty elements (n <= 12).
/// Returns the lexicographically smallest optimal assignment.
BruteForceResult brute_force_cheeger(const SpMat& W, int K, bool normalised);

struct CheegerReport {
    double lambda2 = 0.0;
    double h2 = 0.0;
    double max_degree = 0.0;
    bool unnormalised_holds = false;
    double unnormalised_slack = 0.0;

    bool normalised_available = false;
    double lambda2_normalised = 0.0;
    double h2_normalised = 0.0;
    bool normalised_holds = false;
    double normalised_slack = 0.0;
};

/// Checks h2 <= sqrt(2 lambda2 maxdeg) and hbar2 <= sqrt(2 lambdabar2) with brute-force h.
CheegerReport check_cheeger_inequalities(const SpMat& W);

}  // namespace stclust
