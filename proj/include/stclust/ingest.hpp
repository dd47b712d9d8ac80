#pragma once

#include "stclust/graph_core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace stclust {

struct VoteRecord {
    int t = 0;
    std::string bill;
    std::string voter;
    std::string state;
    std::string party;
    /// +1 yes, -1 no, 0 abstention.
    int vote = 0;
};

struct VoteTable {
    std::vector<VoteRecord> records;

    /// CSV with header t,bill,voter,state,party,vote; votes y/n/a (or 1/-1/0).
    static VoteTable read_csv(std::istream& in);
    static VoteTable read_csv_file(const std::string& path);
};

struct VoteNetwork {
    TemporalNetwork net;
    /// Name of each superset vertex (voter id or state label).
    std::vector<std::string> names;
    /// Party of each voter at its last slice; empty for states.
    std::vector<std::string> parties;
    /// State of each voter; the state label itself for states.
    std::vector<std::string> states;
    /// Original t value of each slice.
    std::vector<int> times;
};

/// Non-multiplex voter network; weight = fraction of shared bills with identical votes.
VoteNetwork senator_network(const VoteTable& v);
/// Multiplex state network over aggregate votes per state and bill.
VoteNetwork state_network(const VoteTable& v);

struct StateValue {
    std::string state;
    int t = 0;
    double value = 0.0;
    int voters = 0;
};

/// Per state and slice, the mean of F over the (up to) two voters with the
/// most records in that slice; ties go to the lowest voter id.
std::vector<StateValue> state_projection(const VoteTable& v, const VoteNetwork& senators,
                                         const Eigen::VectorXd& F);

}  // namespace stclust
