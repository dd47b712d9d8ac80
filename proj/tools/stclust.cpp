#include "stclust/cheeger.hpp"
#include "stclust/error.hpp"
#include "stclust/graph_core.hpp"
#include "stclust/ingest.hpp"
#include "stclust/io.hpp"
#include "stclust/matching.hpp"
#include "stclust/netgen.hpp"
#include "stclust/partitioner.hpp"
#include "stclust/spectral.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace stclust;

namespace {

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::map<std::string, std::string> kv;
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

struct Settings {
    PartitionConfig cfg;
    std::uint64_t seed = 1;
    std::string companion = "norm";
    json as_json() const {
        const auto& s = cfg.solver;
        return {{"seed", seed},
                {"tol", s.tol},
                {"max_iter", s.max_iter},
                {"dense_limit", s.dense_limit},
                {"a_lo", cfg.bisection.lo},
                {"a_hi", cfg.bisection.hi},
                {"bisection_tol", cfg.bisection.rel_tol},
                {"tau_cls", cfg.tau_cls},
                {"tau_temp", cfg.tau_temp},
                {"kappa", cfg.kappa},
                {"theta", cfg.theta},
                {"fibre_tol", cfg.fibre_tol},
                {"R_max", cfg.R_max},
                {"tie_band", cfg.tie_band},
                {"companions", cfg.companions},
                {"companion", companion},
                {"mu", cfg.seba.mu ? json(*cfg.seba.mu) : json(nullptr)},
                {"seba_tol", cfg.seba.rel_tol},
                {"seba_max_iter", cfg.seba.max_iter}};
    }
};

void apply(Settings& st, const std::string& key, const std::string& v) {
    auto num = [&] {
        try {
            size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ValidationError("config key '" + key + "' needs a number, got '" + v + "'");
        }
    };
    auto& c = st.cfg;
    if (key == "seed") st.seed = static_cast<std::uint64_t>(num());
    else if (key == "tol") c.solver.tol = num();
    else if (key == "max_iter") c.solver.max_iter = static_cast<int>(num());
    else if (key == "dense_limit") c.solver.dense_limit = static_cast<int>(num());
    else if (key == "a_lo") c.bisection.lo = num();
    else if (key == "a_hi") c.bisection.hi = num();
    else if (key == "bisection_tol") c.bisection.rel_tol = num();
    else if (key == "tau_cls") c.tau_cls = num();
    else if (key == "tau_temp") c.tau_temp = num();
    else if (key == "kappa") c.kappa = num();
    else if (key == "theta") c.theta = num();
    else if (key == "fibre_tol") c.fibre_tol = num();
    else if (key == "R_max") c.R_max = static_cast<int>(num());
    else if (key == "tie_band") c.tie_band = num();
    else if (key == "mu") c.seba.mu = num();
    else if (key == "seba_tol") c.seba.rel_tol = num();
    else if (key == "seba_max_iter") c.seba.max_iter = static_cast<int>(num());
    else if (key == "companions") {
        if (v != "true" && v != "false") throw ValidationError("companions must be true or false");
        c.companions = v == "true";
    } else if (key == "companion") {
        if (v != "norm" && v != "squared") throw ValidationError("companion must be norm or squared");
        st.companion = v;
        c.companion_mode = v == "squared" ? CompanionMode::SquaredNorm : CompanionMode::Norm;
    } else
        throw ValidationError("unknown config key '" + key + "'");
}

struct Inputs {
    json digests = json::object();
    std::string load(const std::string& path) {
        std::string bytes = read_file(path);
        digests[path] = digest(bytes);
        return bytes;
    }
    json load_json(const std::string& path) {
        std::string bytes = load(path);
        try {
            return json::parse(bytes);
        } catch (const json::parse_error& e) {
            throw ValidationError(path + ": invalid JSON: " + e.what());
        }
    }
};

struct Context {
    Settings st;
    Inputs in;
    std::string command;

    json envelope(json body) const {
        body["stclust"] = {{"command", command}, {"config", st.as_json()}, {"inputs", in.digests}};
        return body;
    }
    void write(const std::string& path, const json& body) const {
        write_file_atomic(path, envelope(body).dump(2) + "\n");
    }
};

std::string sidecar(const std::string& out, const std::string& tag) {
    std::filesystem::path p(out);
    p.replace_extension();
    return p.string() + "." + tag + ".csv";
}

std::vector<int> parse_ints(const std::string& s, const char* what) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + " must be a comma-separated integer list");
        }
    }
    return v;
}

// "auto" or a number.
std::optional<double> auto_or_number(const std::string& s, const char* what) {
    if (s == "auto") return std::nullopt;
    try {
        size_t used = 0;
        double d = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return d;
    } catch (const std::exception&) {
        throw ValidationError(std::string(what) + " must be a number or 'auto'");
    }
}

TemporalNetwork load_network(Context& ctx, const std::string& path) {
    return network_from_json(ctx.in.load_json(path));
}

// Accepts a bare packing or any document with a "packing" member.
Packing load_packing(Context& ctx, const std::string& path, const SpacetimeIndexMap& index) {
    json j = ctx.in.load_json(path);
    return packing_from_json(j.contains("packing") ? j.at("packing") : j, index);
}

std::string norms_csv(const Eigen::MatrixXd& norms) {
    std::ostringstream os;
    os.precision(17);
    os << "t,column,value\n";
    for (int t = 0; t < norms.rows(); ++t)
        for (int c = 0; c < norms.cols(); ++c) os << t + 1 << ',' << c + 1 << ',' << norms(t, c) << '\n';
    return os.str();
}

json truth_to_json(const std::vector<std::vector<int>>& truth) {
    json rows = json::array();
    for (const auto& r : truth) rows.push_back(r);
    return {{"truth", rows}, {"legend", "-1 absent, 0 unclustered, k planted group k"}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral partitioning of temporal networks"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--seed", seed, "Seed for all randomness");

    Context ctx;
    std::string out, input, net_path, packing_path, truth_path, csv_path;
    bool nonmultiplex = false;

    // generate
    auto* gen = app.add_subcommand("generate", "Planted-cluster temporal network");
    GenSpec gs;
    std::string alpha = "0,1", slices = "1,21";
    bool shifting = false;
    gen->add_option("--alpha", alpha, "Cluster counts of the states");
    gen->add_option("--s", slices, "1-based slices of the states");
    gen->add_option("--N", gs.N);
    gen->add_option("--T", gs.T);
    gen->add_option("--eta", gs.eta);
    gen->add_option("--beta", gs.beta);
    gen->add_option("--gamma", gs.gamma);
    gen->add_flag("--shifting", shifting, "Drifting two-cluster non-multiplex network instead");
    gen->add_option("--out", out)->required();
    gen->add_option("--truth", truth_path);

    // build
    auto* build = app.add_subcommand("build", "Assemble W(a) or L(a)");
    double a_build = 1.0;
    std::string kind = "laplacian";
    build->add_option("--input", input)->required();
    build->add_option("--a", a_build);
    build->add_option("--kind", kind)->check(CLI::IsMember({"adjacency", "laplacian", "normalised"}));
    build->add_option("--out", out)->required();

    // eigs
    auto* eigs = app.add_subcommand("eigs", "Smallest eigenpairs of L(a)");
    std::string a_eigs = "auto", bracket;
    int k_eigs = 10;
    eigs->add_option("--input", input)->required();
    eigs->add_option("--a", a_eigs, "Number or 'auto'");
    eigs->add_option("--k", k_eigs);
    eigs->add_option("--tol", ctx.st.cfg.solver.tol);
    eigs->add_option("--max-iter", ctx.st.cfg.solver.max_iter);
    eigs->add_option("--a-bracket", bracket, "lo,hi for the critical-a search");
    eigs->add_option("--out", out)->required();

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Spectral partitioning with SEBA");
    std::string a_cl = "auto", R_cl = "auto";
    std::optional<double> mu;
    cluster->add_option("--input", input)->required();
    cluster->add_flag("--nonmultiplex", nonmultiplex, "Use the non-multiplex framework");
    cluster->add_option("--a", a_cl, "Number or 'auto'");
    cluster->add_option("--R", R_cl, "Integer or 'auto'");
    cluster->add_option("--mu", mu);
    cluster->add_option("--out", out)->required();

    // cheeger
    auto* cheeger = app.add_subcommand("cheeger", "Cheeger ratios of a packing");
    double a_ch = 1.0;
    bool normalised = false;
    cheeger->add_option("--packing", packing_path)->required();
    cheeger->add_option("--net", net_path)->required();
    cheeger->add_option("--a", a_ch);
    cheeger->add_flag("--normalised", normalised);
    cheeger->add_option("--out", out)->required();

    // match
    auto* match = app.add_subcommand("match", "Link per-slice partitions across time");
    std::vector<std::string> partitions;
    double a_m = 1.0;
    match->add_option("--partitions", partitions, "One file per slice, in order")->required();
    match->add_option("--net", net_path)->required();
    match->add_option("--a", a_m);
    match->add_option("--out", out)->required();

    // votes
    auto* votes = app.add_subcommand("votes", "Voting-similarity networks from roll-call CSV");
    std::string mode = "senators";
    votes->add_option("--csv", csv_path)->required();
    votes->add_option("--mode", mode)->check(CLI::IsMember({"senators", "states"}));
    votes->add_option("--out", out)->required();

    // transitions
    auto* trans = app.add_subcommand("transitions", "Splits, merges, appearances of a packing");
    int max_collection = 4;
    trans->add_option("--packing", packing_path)->required();
    trans->add_option("--net", net_path)->required();
    trans->add_option("--max-collection", max_collection);
    trans->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        Settings& st = ctx.st;
        if (!config_path.empty()) {
            for (auto& [k, v] : read_config(config_path)) apply(st, k, v);
            ctx.in.load(config_path);
        }
        if (seed) st.seed = *seed;
        st.cfg.solver.seed = st.seed;
        st.cfg.bisection.solver.seed = st.seed;
        if (mu) st.cfg.seba.mu = *mu;
        ctx.command = app.get_subcommands().front()->get_name();

        if (*gen) {
            Generated g;
            json spec;
            if (shifting) {
                ShiftingSpec ss;
                ss.seed = st.seed;
                g = generate_shifting(ss);
                spec = {{"kind", "shifting"}, {"N", ss.N}, {"T", ss.T}, {"inter_edges", ss.inter_edges}, {"seed", ss.seed}};
            } else {
                gs.alpha = parse_ints(alpha, "--alpha");
                gs.s = parse_ints(slices, "--s");
                gs.seed = st.seed;
                g = generate(gs);
                spec = {{"kind", "planted"}, {"N", gs.N}, {"T", gs.T}, {"alpha", gs.alpha}, {"s", gs.s},
                        {"eta", gs.eta}, {"beta", gs.beta}, {"gamma", gs.gamma}, {"seed", gs.seed}};
            }
            json body = network_to_json(g.net);
            body["generator"] = spec;
            ctx.write(out, body);
            if (!truth_path.empty()) ctx.write(truth_path, truth_to_json(g.truth));
        } else if (*build) {
            auto net = load_network(ctx, input);
            SupraMatrix W = net.is_multiplex() ? build_multiplex_adjacency(net, a_build)
                                               : build_nonmultiplex_adjacency(net, a_build);
            SupraMatrix M = kind == "adjacency" ? W : assemble_laplacian(W, kind == "normalised");
            std::string csv = sidecar(out, "triplets");
            write_file_atomic(csv, triplets_csv(M.matrix));
            ctx.write(out, {{"a", a_build}, {"kind", kind}, {"n", M.size()},
                            {"nonzeros", M.matrix.nonZeros()}, {"triplets_csv", csv}});
        } else if (*eigs) {
            auto net = load_network(ctx, input);
            if (!bracket.empty()) {
                std::stringstream ss(bracket);
                char comma = 0;
                if (!(ss >> st.cfg.bisection.lo >> comma >> st.cfg.bisection.hi) || comma != ',')
                    throw ValidationError("--a-bracket must be lo,hi");
            }
            st.cfg.bisection.solver.tol = st.cfg.solver.tol;
            std::optional<double> a = auto_or_number(a_eigs, "--a");
            json crit = nullptr;
            if (!a) {
                CriticalA c = net.is_multiplex() ? critical_a_multiplex(net, st.cfg.bisection)
                                                 : critical_a_nonmultiplex(net, st.cfg.bisection);
                a = c.a;
                crit = {{"a", c.a}, {"spatial", c.spatial}, {"temporal", c.temporal}, {"evaluations", c.iterations}};
            }
            SupraMatrix W = net.is_multiplex() ? build_multiplex_adjacency(net, *a)
                                               : build_nonmultiplex_adjacency(net, *a);
            EigenSet es = smallest_eigenpairs(laplacian_of(W.matrix), std::min(k_eigs, W.size()), st.cfg.solver);
            es.a = *a;
            json body = eigen_to_json(es);
            if (net.is_multiplex()) {
                es = classify_multiplex(es, net.vertex_count(), net.slice_count(), st.cfg.tau_cls);
                body = eigen_to_json(es);
            } else {
                auto sel = identify_spatial_nonmultiplex(es, net, es.size(), st.cfg.tau_temp);
                body["inner_products"] = std::vector<double>(sel.inner.data(), sel.inner.data() + sel.inner.size());
                body["spatial_indices"] = sel.indices;
            }
            body["critical"] = crit;
            body["residual"] = es.residual;
            std::string csv = sidecar(out, "heatmap");
            write_file_atomic(csv, heatmap_csv(es.vectors, net.index()));
            body["heatmap_csv"] = csv;
            ctx.write(out, body);
        } else if (*cluster) {
            auto net = load_network(ctx, input);
            st.cfg.a = auto_or_number(a_cl, "--a");
            if (auto r = auto_or_number(R_cl, "--R")) {
                if (*r < 1 || *r != static_cast<int>(*r)) throw ValidationError("--R must be a positive integer");
                st.cfg.R = static_cast<int>(*r);
            }
            bool nm = nonmultiplex || !net.is_multiplex();
            PartitionRun run = nm ? run_nonmultiplex(net, st.cfg) : run_multiplex(net, st.cfg);
            json body = run_to_json(run, net.index());
            body["framework"] = nm ? "nonmultiplex" : "multiplex";
            std::string norms = sidecar(out, "norms"), heat = sidecar(out, "seba");
            write_file_atomic(norms, norms_csv(run.slice_norms));
            write_file_atomic(heat, heatmap_csv(run.seba.S, net.index()));
            body["norms_csv"] = norms;
            body["seba_csv"] = heat;
            ctx.write(out, body);
        } else if (*cheeger) {
            auto net = load_network(ctx, net_path);
            Packing p = load_packing(ctx, packing_path, net.index());
            SupraMatrix W = net.is_multiplex() ? build_multiplex_adjacency(net, a_ch)
                                               : build_nonmultiplex_adjacency(net, a_ch);
            json ratios = json::array();
            for (const auto& X : p.elements) ratios.push_back(cheeger_ratio(X, W.matrix, normalised));
            json body = {{"a", a_ch}, {"normalised", normalised}, {"K", p.K()}, {"ratios", ratios},
                         {"max_ratio", packing_score(p, W.matrix, normalised)}};
            if (!p.omega.empty()) body["omega_ratio"] = cheeger_ratio(p.omega, W.matrix, normalised);
            ctx.write(out, body);
        } else if (*match) {
            auto net = load_network(ctx, net_path);
            if (static_cast<int>(partitions.size()) != net.slice_count())
                throw ValidationError("--partitions needs one file per slice (" +
                                      std::to_string(net.slice_count()) + ")");
            std::vector<SlicePartition> seq;
            for (const auto& f : partitions) seq.push_back(slice_partition_from_json(ctx.in.load_json(f)));
            LinkResult lr = link_partitions(seq, net, a_m);
            json ev = json::array();
            for (const auto& e : lr.events)
                ev.push_back({{"t", e.t + 1}, {"kind", e.merge ? "merge" : "split"}, {"from", e.from}, {"to", e.to}});
            json body = {{"a", a_m}, {"packing", packing_to_json(lr.packing, net.index())}, {"events", ev},
                         {"temporal_cut", temporal_cut(lr.packing.labels(), net, a_m)}};
            ctx.write(out, body);
        } else if (*votes) {
            std::string bytes = ctx.in.load(csv_path);
            std::istringstream is(bytes);
            VoteTable vt = VoteTable::read_csv(is);
            VoteNetwork vn = mode == "states" ? state_network(vt) : senator_network(vt);
            json body = network_to_json(vn.net);
            body["times"] = vn.times;
            std::string labels = sidecar(out, "labels");
            std::ostringstream os;
            os << "id,name,state,party\n";
            for (size_t i = 0; i < vn.names.size(); ++i)
                os << i + 1 << ',' << vn.names[i] << ',' << (i < vn.states.size() ? vn.states[i] : "") << ','
                   << (i < vn.parties.size() ? vn.parties[i] : "") << '\n';
            write_file_atomic(labels, os.str());
            body["labels_csv"] = labels;
            ctx.write(out, body);
        } else if (*trans) {
            auto net = load_network(ctx, net_path);
            Packing p = load_packing(ctx, packing_path, net.index());
            auto ev = classify_transitions(p, net.index(), max_collection);
            ctx.write(out, {{"K", p.K()}, {"events", events_to_json(ev)}});
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
