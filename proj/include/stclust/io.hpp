#pragma once

#include "stclust/cheeger.hpp"
#include "stclust/graph_core.hpp"
#include "stclust/matching.hpp"
#include "stclust/partitioner.hpp"
#include "stclust/spectral.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace stclust {

using json = nlohmann::json;

/// Files use 1-based slice and vertex ids throughout.
TemporalNetwork network_from_json(const json& j);
json network_to_json(const TemporalNetwork& net);

Packing packing_from_json(const json& j, const SpacetimeIndexMap& index);
json packing_to_json(const Packing& p, const SpacetimeIndexMap& index);

SlicePartition slice_partition_from_json(const json& j);

json eigen_to_json(const EigenSet& es);
json run_to_json(const PartitionRun& run, const SpacetimeIndexMap& index);
json events_to_json(const std::vector<TransitionEvent>& events);

/// row,col,value with 1-based indices.
std::string triplets_csv(const SpMat& M);
/// t,x,value rows for each column of a spacetime matrix.
std::string heatmap_csv(const Eigen::MatrixXd& F, const SpacetimeIndexMap& index);

std::string read_file(const std::string& path);
json read_json_file(const std::string& path);
/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string digest(const std::string& bytes);

}  // namespace stclust
