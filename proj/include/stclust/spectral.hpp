#pragma once

#include "stclust/graph_core.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace stclust {

enum class EigenLabel { Spatial, Temporal, Unclassified };

std::string to_string(EigenLabel l);

/// Ascending eigenpairs of a symmetric matrix with unit-norm columns.
struct EigenSet {
    double a = 0.0;
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    std::vector<EigenLabel> labels;
    /// Largest relative residual ||Lv - lv|| / max(1, |l|) over the set.
    double residual = 0.0;

    int size() const { return static_cast<int>(values.size()); }
};

struct SolverOptions {
    double tol = 1e-9;
    /// Maximum Lanczos basis size per restart round.
    int max_iter = 300;
    /// Dense solve when n is at most this; shift-invert Lanczos above.
    int dense_limit = 2000;
    double shift = -1e-8;
    std::uint64_t seed = 1;
};

/// In-place orthogonal projector onto an invariant subspace of the operator.
using Projector = std::function<void(Eigen::Ref<Eigen::VectorXd>)>;

/// Flip each column so its largest-magnitude entry is positive (first index wins ties).
void fix_signs(Eigen::MatrixXd& V);

EigenSet smallest_eigenpairs(const SpMat& L, int k, const SolverOptions& opt = {});

/// k smallest eigenpairs of L restricted to the range of `project`.
/// `project` must commute with L. The dense path shifts the complement of
/// the range above the spectrum using `dense_complement`, which must equal I - P.
EigenSet smallest_eigenpairs_restricted(const SpMat& L, int k, const Projector& project,
                                        const Eigen::MatrixXd& dense_complement,
                                        const SolverOptions& opt = {});

/// Labels by eigenvector structure: temporal = f (x) 1_N, spatial = constant slice means.
/// Degenerate groups are rotated onto the temporal/spatial split first.
EigenSet classify_multiplex(EigenSet es, int N, int T, double tau = 1e-8);

/// Removes the temporal subspace {g (x) 1_N : g orthogonal to 1_T} from v.
void remove_temporal(Eigen::Ref<Eigen::VectorXd> v, int N, int T);
/// Dense projector onto the temporal subspace, (I - 11'/T) (x) (11'/N).
Eigen::MatrixXd temporal_projector(int N, int T);

/// Smallest `count` spatial eigenpairs of L(a) of a multiplex network.
EigenSet multiplex_spatial_eigenpairs(const TemporalNetwork& net, double a, int count,
                                      const SolverOptions& opt = {});

struct BisectionOptions {
    double lo = 1e-3;
    double hi = 1e3;
    int max_iter = 60;
    double rel_tol = 1e-6;
    /// Bracket is widened by 10x per side at most this many times.
    int max_expand = 6;
    SolverOptions solver{1e-9, 300, 400, -1e-8, 1};
};

struct CriticalA {
    double a = 0.0;
    /// Multiplex: lambda_2^spat(a); non-multiplex: <L^spat F2, F2>.
    double spatial = 0.0;
    /// Multiplex: a^2 sigma_2(L'); non-multiplex: a^2 <L^temp F2, F2>.
    double temporal = 0.0;
    int iterations = 0;
};

CriticalA critical_a_multiplex(const TemporalNetwork& net, const BisectionOptions& opt = {});

struct SpatialSelection {
    std::vector<int> indices;
    /// m_k for every eigenvector in the set.
    Eigen::VectorXd inner;
    /// Fewer than R vectors fell below the threshold.
    bool incomplete = false;
};

/// Inner products of zero-padded eigenvectors with lifted chain eigenvectors;
/// returns the first R nontrivial vectors (ascending eigenvalue) with m_k < tau_temp.
SpatialSelection identify_spatial_nonmultiplex(const EigenSet& es, const TemporalNetwork& net,
                                               int R, double tau_temp = 0.1);

/// Root of <L^spat F2,F2> - a^2 <L^temp F2,F2>, F2 the second eigenvector of L(a).
CriticalA critical_a_nonmultiplex(const TemporalNetwork& net, const BisectionOptions& opt = {});

}  // namespace stclust
