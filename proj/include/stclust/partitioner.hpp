#pragma once

#include "stclust/cheeger.hpp"
#include "stclust/graph_core.hpp"
#include "stclust/seba.hpp"
#include "stclust/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stclust {

enum class CompanionMode {
    /// ||F(t,.)||_2 on every vertex of slice t.
    Norm,
    /// ||F(t,.)||_2^2 on every vertex of slice t.
    SquaredNorm,
};

struct PartitionConfig {
    std::optional<double> a;
    std::optional<int> R;
    int R_max = 5;
    bool companions = true;
    CompanionMode companion_mode = CompanionMode::Norm;
    double kappa = 3.0;
    double theta = 0.0;
    double fibre_tol = 1e-6;
    double tau_cls = 1e-8;
    double tau_temp = 0.1;
    /// Relative band within which mean Cheeger ratios count as tied.
    double tie_band = 0.05;
    /// Eigenpairs computed in the non-multiplex path; 0 picks R_max + T + 5.
    int eig_count = 0;
    SolverOptions solver;
    BisectionOptions bisection;
    SebaOptions seba;
};

struct ColumnInfo {
    int support = 0;
    /// Unnormalised Cheeger ratio of the support (0 for empty support).
    double ratio = 0.0;
    bool spurious = false;
    /// "", "fibre-constant", "ratio" or "empty".
    std::string reason;
};

struct SelectR {
    int R = 1;
    int argmin = 1;
    /// R just below the largest relative spectral gap; 0 if no gap exists.
    int gap_R = 0;
    /// gaps[i] = (l_{i+3} - l_{i+2}) / max(l_{i+2}, eps) for 1-based spatial values, i.e. from lambda_2 up.
    std::vector<double> gaps;
};

struct TransitionEvent {
    enum class Kind { Split, Merge, Appearance, Disappearance };
    /// 0-based earlier slice of the (t, t+1) pair.
    int t = 0;
    Kind kind = Kind::Split;
    int J = 0;
    /// Element index, or -1 for Omega.
    int actor = -1;
    std::vector<int> targets;
    bool shrinking = false;
};

std::string to_string(TransitionEvent::Kind k);

struct PartitionRun {
    double a = 0.0;
    bool a_automatic = false;
    CriticalA critical;
    int R = 1;
    SelectR selection;
    std::vector<std::pair<int, double>> mean_ratios;
    /// Spatial eigenvalues from lambda_1 upward.
    Eigen::VectorXd spatial_values;
    /// Eigenvector indices used (non-multiplex: positions in the computed set).
    std::vector<int> eigen_indices;
    Eigen::VectorXd inner_products;
    /// Selected spatial eigenvectors, one per column.
    Eigen::MatrixXd vectors;
    Eigen::MatrixXd seba_inputs;
    SebaResult seba;
    std::vector<ColumnInfo> columns;
    std::vector<int> spurious;
    Packing packing;
    /// SEBA column behind each packing element.
    std::vector<int> element_columns;
    /// ||F_k(t,.)||_2 per slice (rows) and selected eigenvector (columns).
    Eigen::MatrixXd slice_norms;
    std::vector<std::string> warnings;
};

/// Interleaves each column F with its slice-norm companion.
Eigen::MatrixXd companion_vectors(const Eigen::MatrixXd& F, const SpacetimeIndexMap& index,
                                  CompanionMode mode = CompanionMode::Norm);

SelectR select_R(const Eigen::VectorXd& spatial_values,
                 const std::vector<std::pair<int, double>>& mean_ratios, double tie_band = 0.05);

std::vector<ColumnInfo> detect_spurious(const Eigen::MatrixXd& S, const SpacetimeIndexMap& index,
                                        const SpMat& W, double kappa = 3.0, double fibre_tol = 1e-6,
                                        double theta = 0.0);

/// Positive supports of the non-spurious columns; overlaps go to the largest value.
Packing assign_packing(const Eigen::MatrixXd& S, const std::vector<ColumnInfo>& columns,
                       double theta = 0.0, std::vector<int>* element_columns = nullptr);

PartitionRun run_multiplex(const TemporalNetwork& net, const PartitionConfig& cfg = {});
PartitionRun run_nonmultiplex(const TemporalNetwork& net, const PartitionConfig& cfg = {});

std::vector<TransitionEvent> classify_transitions(const Packing& p, const SpacetimeIndexMap& index,
                                                  int max_collection = 4);

/// Per-slice norms ||F(t,.)||_2 of each column.
Eigen::MatrixXd slice_norms(const Eigen::MatrixXd& F, const SpacetimeIndexMap& index);

}  // namespace stclust
