#include "stclust/ingest.hpp"

#include "stclust/error.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <tuple>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace stclust {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        size_t a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
        s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    }
    return out;
}

int parse_vote(const std::string& s, int line) {
    std::string v = s;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "y" || v == "1" || v == "+1") return 1;
    if (v == "n" || v == "-1") return -1;
    if (v == "a" || v == "0") return 0;
    throw ValidationError("line " + std::to_string(line) + ": vote must be y, n or a");
}

struct SliceVotes {
    std::vector<std::string> bills;
    std::map<std::string, int> bill_index;
};

}  // namespace

VoteTable VoteTable::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("vote CSV is empty");
    auto header = split_csv(line);
    const std::vector<std::string> want{"t", "bill", "voter", "state", "party", "vote"};
    if (header != want) throw ValidationError("vote CSV header must be t,bill,voter,state,party,vote");
    VoteTable table;
    std::set<std::tuple<int, std::string, std::string>> seen;
    int ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = split_csv(line);
        if (f.size() != 6) throw ValidationError("line " + std::to_string(ln) + ": expected 6 fields");
        VoteRecord r;
        try {
            size_t pos = 0;
            r.t = std::stoi(f[0], &pos);
            if (pos != f[0].size()) throw std::invalid_argument("t");
        } catch (const std::exception&) {
            throw ValidationError("line " + std::to_string(ln) + ": t must be an integer");
        }
        r.bill = f[1];
        r.voter = f[2];
        r.state = f[3];
        r.party = f[4];
        if (r.bill.empty() || r.voter.empty())
            throw ValidationError("line " + std::to_string(ln) + ": bill and voter are required");
        r.vote = parse_vote(f[5], ln);
        if (!seen.insert({r.t, r.bill, r.voter}).second)
            throw ValidationError("line " + std::to_string(ln) + ": duplicate (t, bill, voter) record");
        table.records.push_back(std::move(r));
    }
    if (table.records.empty()) throw ValidationError("vote CSV has no records");
    return table;
}

VoteTable VoteTable::read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    return read_csv(in);
}

namespace {

std::vector<int> slice_times(const VoteTable& v) {
    std::set<int> ts;
    for (const auto& r : v.records) ts.insert(r.t);
    return {ts.begin(), ts.end()};
}

// Agreement weight between two vote rows; 2 marks "no record".
double agreement(const std::vector<int>& a, const std::vector<int>& b) {
    int shared = 0, same = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != 2 && b[i] != 2) {
            ++shared;
            if (a[i] == b[i]) ++same;
        }
    return shared ? static_cast<double>(same) / shared : 0.0;
}

SpMat weights(const std::vector<std::vector<int>>& rows) {
    int n = static_cast<int>(rows.size());
    std::vector<Triplet> trips;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            double w = agreement(rows[x], rows[y]);
            if (w > 0) {
                trips.emplace_back(x, y, w);
                trips.emplace_back(y, x, w);
            }
        }
    SpMat M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

}  // namespace

VoteNetwork senator_network(const VoteTable& v) {
    if (v.records.empty()) throw ValidationError("vote table is empty");
    VoteNetwork out;
    out.times = slice_times(v);
    std::map<std::string, int> vid;
    for (const auto& r : v.records) vid.emplace(r.voter, 0);
    int N = 0;
    for (auto& [name, id] : vid) {
        id = N++;
        out.names.push_back(name);
    }
    out.parties.assign(N, "");
    out.states.assign(N, "");
    std::vector<int> last_t(N, std::numeric_limits<int>::min());
    std::map<int, int> tpos;
    for (size_t i = 0; i < out.times.size(); ++i) tpos[out.times[i]] = static_cast<int>(i);
    const int T = static_cast<int>(out.times.size());
    std::vector<std::map<std::string, int>> bills(T);
    std::vector<std::set<int>> present(T);
    for (const auto& r : v.records) {
        int t = tpos[r.t], x = vid[r.voter];
        bills[t].emplace(r.bill, 0);
        present[t].insert(x);
        if (r.t >= last_t[x]) {
            last_t[x] = r.t;
            out.parties[x] = r.party;
            out.states[x] = r.state;
        }
    }
    std::vector<std::vector<int>> presence(T);
    std::vector<std::vector<std::vector<int>>> rows(T);
    for (int t = 0; t < T; ++t) {
        int b = 0;
        for (auto& [name, id] : bills[t]) id = b++;
        presence[t].assign(present[t].begin(), present[t].end());
        rows[t].assign(presence[t].size(), std::vector<int>(b, 2));
    }
    for (const auto& r : v.records) {
        int t = tpos[r.t], x = vid[r.voter];
        int rank = static_cast<int>(std::lower_bound(presence[t].begin(), presence[t].end(), x) -
                                    presence[t].begin());
        rows[t][rank][bills[t][r.bill]] = r.vote;
    }
    std::vector<SpMat> layers;
    for (int t = 0; t < T; ++t) layers.push_back(weights(rows[t]));
    out.net = TemporalNetwork::nonmultiplex(N, std::move(presence), std::move(layers));
    return out;
}

VoteNetwork state_network(const VoteTable& v) {
    if (v.records.empty()) throw ValidationError("vote table is empty");
    VoteNetwork out;
    out.times = slice_times(v);
    std::map<std::string, int> sid;
    for (const auto& r : v.records) sid.emplace(r.state, 0);
    int N = 0;
    for (auto& [name, id] : sid) {
        id = N++;
        out.names.push_back(name);
        out.states.push_back(name);
    }
    out.parties.assign(N, "");
    std::map<int, int> tpos;
    for (size_t i = 0; i < out.times.size(); ++i) tpos[out.times[i]] = static_cast<int>(i);
    const int T = static_cast<int>(out.times.size());
    std::vector<std::map<std::string, int>> bills(T);
    std::vector<std::set<int>> present(T);
    for (const auto& r : v.records) {
        bills[tpos[r.t]].emplace(r.bill, 0);
        present[tpos[r.t]].insert(sid[r.state]);
    }
    std::string missing;
    for (int t = 0; t < T; ++t)
        for (int x = 0; x < N; ++x)
            if (!present[t].count(x)) missing += " " + out.names[x] + "@t=" + std::to_string(out.times[t]);
    if (!missing.empty()) throw ValidationError("states absent from slices:" + missing);
    // Aggregate votes; "no record" stays distinct from an aggregate of 0.
    const int none = std::numeric_limits<int>::min();
    std::vector<std::vector<std::vector<int>>> agg(T);
    for (int t = 0; t < T; ++t) {
        int b = 0;
        for (auto& [name, id] : bills[t]) id = b++;
        agg[t].assign(N, std::vector<int>(b, none));
    }
    for (const auto& r : v.records) {
        int t = tpos[r.t];
        int& cell = agg[t][sid[r.state]][bills[t][r.bill]];
        cell = (cell == none ? 0 : cell) + r.vote;
    }
    std::vector<SpMat> layers;
    for (int t = 0; t < T; ++t) {
        std::vector<Triplet> trips;
        for (int x = 0; x < N; ++x)
            for (int y = x + 1; y < N; ++y) {
                int shared = 0, same = 0;
                const auto &a = agg[t][x], &b = agg[t][y];
                for (size_t i = 0; i < a.size(); ++i)
                    if (a[i] != none && b[i] != none) {
                        ++shared;
                        if (a[i] == b[i]) ++same;
                    }
                double w = shared ? static_cast<double>(same) / shared : 0.0;
                if (w > 0) {
                    trips.emplace_back(x, y, w);
                    trips.emplace_back(y, x, w);
                }
            }
        SpMat M(N, N);
        M.setFromTriplets(trips.begin(), trips.end());
        layers.push_back(M);
    }
    out.net = TemporalNetwork::multiplex(std::move(layers));
    return out;
}

std::vector<StateValue> state_projection(const VoteTable& v, const VoteNetwork& senators,
                                         const Eigen::VectorXd& F) {
    const auto& idx = senators.net.index();
    if (F.size() != idx.size()) throw ValidationError("vector length must match the senator network");
    std::map<std::string, int> vid;
    for (size_t i = 0; i < senators.names.size(); ++i) vid[senators.names[i]] = static_cast<int>(i);
    std::map<int, int> tpos;
    for (size_t i = 0; i < senators.times.size(); ++i) tpos[senators.times[i]] = static_cast<int>(i);
    // (t, state) -> voter -> record count
    std::map<std::pair<int, std::string>, std::map<int, int>> counts;
    for (const auto& r : v.records) {
        auto it = vid.find(r.voter);
        auto jt = tpos.find(r.t);
        if (it == vid.end() || jt == tpos.end()) throw ValidationError("vote table does not match the network");
        ++counts[{jt->second, r.state}][it->second];
    }
    std::vector<StateValue> out;
    for (const auto& [key, per] : counts) {
        std::vector<std::pair<int, int>> ranked;  // (-count, voter id)
        for (const auto& [x, c] : per) ranked.push_back({-c, x});
        std::sort(ranked.begin(), ranked.end());
        int take = std::min<int>(2, static_cast<int>(ranked.size()));
        double s = 0.0;
        for (int i = 0; i < take; ++i) s += F[idx.encode(key.first, ranked[i].second)];
        out.push_back({key.second, senators.times[key.first], s / take, take});
    }
    std::sort(out.begin(), out.end(), [](const StateValue& a, const StateValue& b) {
        return a.state != b.state ? a.state < b.state : a.t < b.t;
    });
    return out;
}

}  // namespace stclust
