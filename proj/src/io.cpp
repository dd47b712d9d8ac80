#include "stclust/io.hpp"

#include "stclust/error.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace stclust {

namespace {

int as_int(const json& v, const char* what) {
    if (!v.is_number_integer()) throw ValidationError(std::string(what) + " must be an integer");
    return v.get<int>();
}

double as_double(const json& v, const char* what) {
    if (!v.is_number()) throw ValidationError(std::string(what) + " must be a number");
    return v.get<double>();
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

}  // namespace

TemporalNetwork network_from_json(const json& j) {
    int N = as_int(field(j, "N"), "N"), T = as_int(field(j, "T"), "T");
    if (N < 1 || T < 1) throw ValidationError("N and T must be positive");
    const json& L = field(j, "layers");
    if (!L.is_array() || static_cast<int>(L.size()) != T) throw ValidationError("layers must list T slices");
    std::vector<std::vector<int>> presence(T);
    std::vector<std::vector<std::array<double, 3>>> edges(T);
    std::vector<char> seen(T, 0);
    for (const auto& layer : L) {
        int t = as_int(field(layer, "t"), "t") - 1;
        if (t < 0 || t >= T) throw ValidationError("layer t out of range");
        if (seen[t]) throw ValidationError("slice " + std::to_string(t + 1) + " listed twice");
        seen[t] = 1;
        if (layer.contains("present")) {
            for (const auto& x : layer.at("present")) presence[t].push_back(as_int(x, "present vertex") - 1);
        } else {
            for (int x = 0; x < N; ++x) presence[t].push_back(x);
        }
        if (layer.contains("edges"))
            for (const auto& e : layer.at("edges")) {
                if (!e.is_array() || e.size() != 3) throw ValidationError("edges must be [x, y, w]");
                edges[t].push_back({static_cast<double>(as_int(e[0], "x") - 1),
                                    static_cast<double>(as_int(e[1], "y") - 1), as_double(e[2], "w")});
            }
    }
    std::vector<SpMat> layers(T);
    bool full = true;
    for (int t = 0; t < T; ++t) {
        auto P = presence[t];
        std::sort(P.begin(), P.end());
        if (std::adjacent_find(P.begin(), P.end()) != P.end())
            throw ValidationError("slice " + std::to_string(t + 1) + " lists a vertex twice");
        for (int x : P)
            if (x < 0 || x >= N) throw ValidationError("slice " + std::to_string(t + 1) + " has a vertex outside 1..N");
        presence[t] = P;
        if (static_cast<int>(P.size()) != N) full = false;
        std::vector<int> rank(N, -1);
        for (size_t r = 0; r < P.size(); ++r) rank[P[r]] = static_cast<int>(r);
        std::vector<Triplet> trips;
        std::set<std::pair<int, int>> pairs;
        for (const auto& e : edges[t]) {
            int x = static_cast<int>(e[0]), y = static_cast<int>(e[1]);
            if (x < 0 || x >= N || y < 0 || y >= N || rank[x] < 0 || rank[y] < 0)
                throw ValidationError("slice " + std::to_string(t + 1) + " has an edge on an absent vertex");
            if (x == y) throw ValidationError("slice " + std::to_string(t + 1) + " has a self-loop");
            if (e[2] < 0) throw ValidationError("slice " + std::to_string(t + 1) + " has a negative weight");
            if (!pairs.insert({std::min(x, y), std::max(x, y)}).second)
                throw ValidationError("slice " + std::to_string(t + 1) + " lists an edge twice");
            trips.emplace_back(rank[x], rank[y], e[2]);
            trips.emplace_back(rank[y], rank[x], e[2]);
        }
        SpMat M(static_cast<int>(P.size()), static_cast<int>(P.size()));
        M.setFromTriplets(trips.begin(), trips.end());
        layers[t] = M;
    }
    std::optional<Eigen::MatrixXd> Wp;
    if (j.contains("temporal") && !(j.at("temporal").is_string() && j.at("temporal") == "chain")) {
        const json& tj = j.at("temporal");
        if (!tj.is_object() || !tj.contains("edges")) throw ValidationError("temporal must be \"chain\" or {\"edges\": ...}");
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(T, T);
        for (const auto& e : tj.at("edges")) {
            if (!e.is_array() || e.size() != 3) throw ValidationError("temporal edges must be [t, s, w]");
            int a = as_int(e[0], "t") - 1, b = as_int(e[1], "s") - 1;
            if (a < 0 || a >= T || b < 0 || b >= T || a == b) throw ValidationError("temporal edge out of range");
            M(a, b) = M(b, a) = as_double(e[2], "w");
        }
        Wp = M;
    }
    if (full) return TemporalNetwork::multiplex(std::move(layers), Wp);
    if (Wp && *Wp != chain_weights(T))
        throw ValidationError("non-multiplex networks support only the chain temporal coupling");
    return TemporalNetwork::nonmultiplex(N, std::move(presence), std::move(layers));
}

json network_to_json(const TemporalNetwork& net) {
    json j;
    j["N"] = net.vertex_count();
    j["T"] = net.slice_count();
    json layers = json::array();
    for (int t = 0; t < net.slice_count(); ++t) {
        json layer;
        layer["t"] = t + 1;
        json present = json::array();
        for (int x : net.present(t)) present.push_back(x + 1);
        layer["present"] = present;
        json edges = json::array();
        const SpMat& L = net.layer(t);
        std::vector<std::array<double, 3>> es;
        for (int k = 0; k < L.outerSize(); ++k)
            for (SpMat::InnerIterator it(L, k); it; ++it)
                if (it.row() < it.col())
                    es.push_back({static_cast<double>(net.present(t)[it.row()] + 1),
                                  static_cast<double>(net.present(t)[it.col()] + 1), it.value()});
        std::sort(es.begin(), es.end());
        for (const auto& e : es) edges.push_back({static_cast<int>(e[0]), static_cast<int>(e[1]), e[2]});
        layer["edges"] = edges;
        layers.push_back(layer);
    }
    j["layers"] = layers;
    if (net.chain_temporal()) {
        j["temporal"] = "chain";
    } else {
        json edges = json::array();
        const auto& W = net.temporal_weights();
        for (int a = 0; a < W.rows(); ++a)
            for (int b = a + 1; b < W.cols(); ++b)
                if (W(a, b) != 0) edges.push_back({a + 1, b + 1, W(a, b)});
        j["temporal"] = {{"edges", edges}};
    }
    return j;
}

namespace {

std::vector<int> vertices_from_json(const json& arr, const SpacetimeIndexMap& index) {
    std::vector<int> out;
    if (!arr.is_array()) throw ValidationError("packing sets must be arrays of [t, x]");
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2) throw ValidationError("packing entries must be [t, x]");
        out.push_back(index.encode(as_int(p[0], "t") - 1, as_int(p[1], "x") - 1));
    }
    std::sort(out.begin(), out.end());
    return out;
}

json vertices_to_json(const std::vector<int>& X, const SpacetimeIndexMap& index) {
    json arr = json::array();
    for (int i : X) {
        auto [t, x] = index.decode(i);
        arr.push_back({t + 1, x + 1});
    }
    return arr;
}

}  // namespace

Packing packing_from_json(const json& j, const SpacetimeIndexMap& index) {
    Packing p;
    p.n = index.size();
    for (const auto& X : field(j, "elements")) p.elements.push_back(vertices_from_json(X, index));
    if (j.contains("omega")) {
        p.omega = vertices_from_json(j.at("omega"), index);
    } else {
        std::vector<char> in(p.n, 0);
        for (const auto& X : p.elements)
            for (int v : X) in[v] = 1;
        for (int v = 0; v < p.n; ++v)
            if (!in[v]) p.omega.push_back(v);
    }
    if (j.contains("K") && as_int(j.at("K"), "K") != p.K()) throw ValidationError("K does not match the element count");
    p.validate();
    return p;
}

json packing_to_json(const Packing& p, const SpacetimeIndexMap& index) {
    json j;
    j["K"] = p.K();
    json el = json::array();
    for (const auto& X : p.elements) el.push_back(vertices_to_json(X, index));
    j["elements"] = el;
    j["omega"] = vertices_to_json(p.omega, index);
    return j;
}

SlicePartition slice_partition_from_json(const json& j) {
    SlicePartition P;
    auto read = [](const json& arr) {
        std::vector<int> out;
        if (!arr.is_array()) throw ValidationError("clusters must be arrays of vertex ids");
        for (const auto& x : arr) out.push_back(as_int(x, "vertex") - 1);
        return out;
    };
    const json& cl = j.is_array() ? j : field(j, "clusters");
    for (const auto& c : cl) P.clusters.push_back(read(c));
    if (j.is_object() && j.contains("omega")) P.omega = read(j.at("omega"));
    return P;
}

json eigen_to_json(const EigenSet& es) {
    json j;
    j["a"] = es.a;
    j["values"] = std::vector<double>(es.values.data(), es.values.data() + es.values.size());
    json labels = json::array();
    for (auto l : es.labels) labels.push_back(to_string(l));
    j["labels"] = labels;
    json vecs = json::array();
    for (int c = 0; c < es.vectors.cols(); ++c) {
        Eigen::VectorXd v = es.vectors.col(c);
        vecs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    }
    j["vectors"] = vecs;
    j["residual"] = es.residual;
    return j;
}

json events_to_json(const std::vector<TransitionEvent>& events) {
    json arr = json::array();
    for (const auto& e : events) {
        json targets = json::array();
        for (int k : e.targets) targets.push_back(k < 0 ? json("omega") : json(k + 1));
        arr.push_back({{"t", e.t + 1},
                       {"kind", to_string(e.kind)},
                       {"J", e.J},
                       {"actor", e.actor < 0 ? json("omega") : json(e.actor + 1)},
                       {"targets", targets},
                       {"shrinking", e.shrinking}});
    }
    return arr;
}

json run_to_json(const PartitionRun& run, const SpacetimeIndexMap& index) {
    json j;
    j["a"] = run.a;
    j["a_automatic"] = run.a_automatic;
    if (run.a_automatic)
        j["critical"] = {{"a", run.critical.a},
                         {"spatial", run.critical.spatial},
                         {"temporal", run.critical.temporal},
                         {"evaluations", run.critical.iterations}};
    j["R"] = run.R;
    j["R_automatic"] = run.selection.R;
    j["R_argmin"] = run.selection.argmin;
    j["R_gap"] = run.selection.gap_R;
    j["spectral_gaps"] = run.selection.gaps;
    json mr = json::array();
    for (auto [R, h] : run.mean_ratios) mr.push_back({{"R", R}, {"mean_ratio", h}});
    j["mean_ratios"] = mr;
    j["spatial_values"] = std::vector<double>(run.spatial_values.data(),
                                              run.spatial_values.data() + run.spatial_values.size());
    j["eigen_indices"] = run.eigen_indices;
    if (run.inner_products.size())
        j["inner_products"] = std::vector<double>(run.inner_products.data(),
                                                  run.inner_products.data() + run.inner_products.size());
    json cols = json::array();
    for (size_t c = 0; c < run.columns.size(); ++c) {
        const auto& ci = run.columns[c];
        Eigen::VectorXd s = run.seba.S.col(static_cast<int>(c));
        cols.push_back({{"support", ci.support},
                        {"ratio", ci.ratio},
                        {"spurious", ci.spurious},
                        {"reason", ci.reason},
                        {"values", std::vector<double>(s.data(), s.data() + s.size())}});
    }
    j["seba"] = {{"mu", run.seba.mu},
                 {"objective", run.seba.objective},
                 {"iterations", run.seba.iterations},
                 {"monotone", run.seba.monotone},
                 {"columns", cols}};
    j["element_columns"] = run.element_columns;
    j["packing"] = packing_to_json(run.packing, index);
    json norms = json::array();
    for (int t = 0; t < run.slice_norms.rows(); ++t) {
        Eigen::VectorXd r = run.slice_norms.row(t).transpose();
        norms.push_back(std::vector<double>(r.data(), r.data() + r.size()));
    }
    j["slice_norms"] = norms;
    j["warnings"] = run.warnings;
    return j;
}

std::string triplets_csv(const SpMat& M) {
    std::ostringstream os;
    os << std::setprecision(17) << "row,col,value\n";
    for (const auto& e : to_triplets(M)) os << e.row() + 1 << ',' << e.col() + 1 << ',' << e.value() << '\n';
    return os.str();
}

std::string heatmap_csv(const Eigen::MatrixXd& F, const SpacetimeIndexMap& index) {
    std::ostringstream os;
    os << std::setprecision(17) << "column,t,x,value\n";
    for (int c = 0; c < F.cols(); ++c)
        for (int i = 0; i < index.size(); ++i) {
            auto [t, x] = index.decode(i);
            os << c + 1 << ',' << t + 1 << ',' << x + 1 << ',' << F(i, c) << '\n';
        }
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ValidationError(path + ": invalid JSON (" + e.what() + ")");
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + path);
        out << content;
        if (!out) throw ValidationError("cannot write " + path);
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw ValidationError("cannot rename into " + path + ": " + ec.message());
}

std::string digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace stclust
