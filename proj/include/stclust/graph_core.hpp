#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <optional>
#include <utility>
#include <vector>

namespace stclust {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Maps present (t, x) pairs to the flattened spacetime index and back.
/// Slices and vertices are 0-based internally. Within a slice, vertices are
/// ordered by their superset id, so the multiplex case gives i = N*t + x.
class SpacetimeIndexMap {
public:
    SpacetimeIndexMap() = default;
    SpacetimeIndexMap(int N, const std::vector<std::vector<int>>& presence);

    int vertex_count() const { return N_; }
    int slice_count() const { return static_cast<int>(offsets_.size()) - 1; }
    int size() const { return offsets_.back(); }
    bool multiplex() const { return multiplex_; }

    int offset(int t) const { return offsets_[t]; }
    int slice_size(int t) const { return offsets_[t + 1] - offsets_[t]; }

    /// Spacetime index of (t, x) or -1 if x is absent at t.
    int find(int t, int x) const;
    /// Like find, but throws ValidationError on absent or out-of-range pairs.
    int encode(int t, int x) const;
    std::pair<int, int> decode(int i) const;

    /// Superset id of the r-th present vertex of slice t.
    int vertex_at(int t, int r) const { return vertices_[offsets_[t] + r]; }

private:
    int N_ = 0;
    bool multiplex_ = true;
    std::vector<int> offsets_{0};
    std::vector<int> vertices_;     // superset id per spacetime index
    std::vector<int> slice_of_;     // slice per spacetime index
    std::vector<int> rank_;         // T*N table, -1 if absent
};

/// Sequence of symmetric spatial layers over per-slice vertex sets.
/// Layer t is sized N_t x N_t and indexed by rank within presence[t].
class TemporalNetwork {
public:
    /// All vertices present in every slice. temporal defaults to the unit chain.
    static TemporalNetwork multiplex(std::vector<SpMat> layers,
                                     std::optional<Eigen::MatrixXd> temporal = std::nullopt);
    /// Vertex sets vary by slice; temporal coupling is always the unit chain.
    static TemporalNetwork nonmultiplex(int N, std::vector<std::vector<int>> presence,
                                        std::vector<SpMat> layers);

    int vertex_count() const { return N_; }
    int slice_count() const { return static_cast<int>(layers_.size()); }
    bool is_multiplex() const { return index_.multiplex(); }
    bool chain_temporal() const { return chain_; }

    const SpMat& layer(int t) const { return layers_[t]; }
    const std::vector<int>& present(int t) const { return presence_[t]; }
    const std::vector<std::vector<int>>& presence() const { return presence_; }
    /// T x T temporal weights W'. For non-multiplex networks this is the chain.
    const Eigen::MatrixXd& temporal_weights() const { return temporal_; }
    const SpacetimeIndexMap& index() const { return index_; }
    int spacetime_size() const { return index_.size(); }

    /// Layer t embedded in the N x N superset frame (absent rows are zero).
    SpMat layer_full(int t) const;

private:
    int N_ = 0;
    bool chain_ = true;
    std::vector<SpMat> layers_;
    std::vector<std::vector<int>> presence_;
    Eigen::MatrixXd temporal_;
    SpacetimeIndexMap index_;
};

enum class MatrixKind { Adjacency, Laplacian, NormalisedLaplacian };

/// Symmetric spacetime matrix with its assembly strength.
struct SupraMatrix {
    SpMat matrix;
    MatrixKind kind = MatrixKind::Adjacency;
    double a = 0.0;

    int size() const { return static_cast<int>(matrix.rows()); }
};

/// Spatial and temporal adjacency parts at unit strength: W(a) = spatial + a^2 temporal.
struct SupraParts {
    SpMat spatial;
    SpMat temporal;
};

struct DegreeData {
    Eigen::VectorXd total;
    Eigen::VectorXd spatial;
    /// Temporal degree at unit strength per spacetime vertex.
    Eigen::VectorXd temporal;
    /// Temporal degree per slice; meaningful in the multiplex case.
    Eigen::VectorXd temporal_slice;

    double volume(const std::vector<int>& X) const;
};

Eigen::MatrixXd chain_weights(int T);

SupraParts multiplex_parts(const TemporalNetwork& net);
SupraParts nonmultiplex_parts(const TemporalNetwork& net);
SpMat combine(const SupraParts& parts, double a);

SupraMatrix build_multiplex_adjacency(const TemporalNetwork& net, double a);
SupraMatrix build_nonmultiplex_adjacency(const TemporalNetwork& net, double a);
SupraMatrix assemble_laplacian(const SupraMatrix& W, bool normalised);
/// Plain D - W of a symmetric weight matrix.
SpMat laplacian_of(const SpMat& W);
/// L^D of the slice-averaged spatial adjacency (N x N).
SpMat dynamic_laplacian(const TemporalNetwork& net);
DegreeData degrees(const SupraMatrix& W, const TemporalNetwork& net, double a);

/// Row, col, value triplets of the upper and lower parts in column order.
std::vector<Triplet> to_triplets(const SpMat& M);

}  // namespace stclust
