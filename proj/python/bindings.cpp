#include "stclust/cheeger.hpp"
#include "stclust/error.hpp"
#include "stclust/io.hpp"
#include "stclust/matching.hpp"
#include "stclust/netgen.hpp"
#include "stclust/partitioner.hpp"
#include "stclust/seba.hpp"
#include "stclust/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace stclust;

namespace {

SupraMatrix adjacency(const TemporalNetwork& net, double a) {
    return net.is_multiplex() ? build_multiplex_adjacency(net, a) : build_nonmultiplex_adjacency(net, a);
}

py::tuple triplets(const SpMat& M) {
    auto tr = to_triplets(M);
    Eigen::VectorXi r(tr.size()), c(tr.size());
    Eigen::VectorXd v(tr.size());
    for (size_t i = 0; i < tr.size(); ++i) r[i] = tr[i].row(), c[i] = tr[i].col(), v[i] = tr[i].value();
    return py::make_tuple(r, c, v, M.rows());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral partitioning of temporal networks";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<TemporalNetwork>(m, "TemporalNetwork")
        .def_static("from_json", [](const std::string& s) { return network_from_json(json::parse(s)); })
        .def("to_json", [](const TemporalNetwork& n) { return network_to_json(n).dump(); })
        .def_property_readonly("N", &TemporalNetwork::vertex_count)
        .def_property_readonly("T", &TemporalNetwork::slice_count)
        .def_property_readonly("size", &TemporalNetwork::spacetime_size)
        .def_property_readonly("multiplex", &TemporalNetwork::is_multiplex)
        .def("present", &TemporalNetwork::present, py::arg("t"))
        .def("layer", [](const TemporalNetwork& n, int t) { return Eigen::MatrixXd(n.layer(t)); }, py::arg("t"));

    m.def(
        "generate",
        [](int N, int T, std::vector<int> alpha, std::vector<int> s, double eta, double beta, int gamma,
           std::uint64_t seed) {
            GenSpec g{N, T, std::move(alpha), std::move(s), eta, beta, gamma, seed};
            Generated out = generate(g);
            return py::make_tuple(out.net, out.truth);
        },
        py::arg("N") = 20, py::arg("T") = 21, py::arg("alpha") = std::vector<int>{0, 1},
        py::arg("s") = std::vector<int>{1, 21}, py::arg("eta") = 0.8, py::arg("beta") = 1.5, py::arg("gamma") = 3,
        py::arg("seed") = 7);

    m.def(
        "generate_shifting",
        [](std::uint64_t seed, int inter_edges) {
            ShiftingSpec g;
            g.seed = seed;
            g.inter_edges = inter_edges;
            Generated out = generate_shifting(g);
            return py::make_tuple(out.net, out.truth);
        },
        py::arg("seed") = 11, py::arg("inter_edges") = 50);

    m.def(
        "supra_laplacian",
        [](const TemporalNetwork& net, double a, bool normalised) {
            return triplets(assemble_laplacian(adjacency(net, a), normalised).matrix);
        },
        py::arg("net"), py::arg("a"), py::arg("normalised") = false,
        "Returns (rows, cols, values, n) of L(a).");

    m.def(
        "eigenpairs",
        [](const TemporalNetwork& net, double a, int k) {
            EigenSet es = smallest_eigenpairs(laplacian_of(adjacency(net, a).matrix), k);
            std::vector<std::string> labels;
            if (net.is_multiplex()) {
                es = classify_multiplex(es, net.vertex_count(), net.slice_count());
                for (auto l : es.labels) labels.push_back(to_string(l));
            }
            return py::make_tuple(es.values, es.vectors, labels);
        },
        py::arg("net"), py::arg("a"), py::arg("k"));

    m.def(
        "critical_a",
        [](const TemporalNetwork& net) {
            return net.is_multiplex() ? critical_a_multiplex(net).a : critical_a_nonmultiplex(net).a;
        },
        py::arg("net"));

    m.def(
        "cluster",
        [](const TemporalNetwork& net, std::optional<double> a, std::optional<int> R, bool nonmultiplex) {
            PartitionConfig cfg;
            cfg.a = a;
            cfg.R = R;
            bool nm = nonmultiplex || !net.is_multiplex();
            PartitionRun run = nm ? run_nonmultiplex(net, cfg) : run_multiplex(net, cfg);
            return run_to_json(run, net.index()).dump();
        },
        py::arg("net"), py::arg("a") = py::none(), py::arg("R") = py::none(), py::arg("nonmultiplex") = false);

    m.def(
        "transitions",
        [](const TemporalNetwork& net, const std::string& packing, int max_collection) {
            json j = json::parse(packing);
            Packing p = packing_from_json(j.contains("packing") ? j.at("packing") : j, net.index());
            return events_to_json(classify_transitions(p, net.index(), max_collection)).dump();
        },
        py::arg("net"), py::arg("packing"), py::arg("max_collection") = 4);

    m.def(
        "packing_ratios",
        [](const TemporalNetwork& net, const std::string& packing, double a, bool normalised) {
            json j = json::parse(packing);
            Packing p = packing_from_json(j.contains("packing") ? j.at("packing") : j, net.index());
            SpMat W = adjacency(net, a).matrix;
            std::vector<double> r;
            for (const auto& X : p.elements) r.push_back(cheeger_ratio(X, W, normalised));
            return r;
        },
        py::arg("net"), py::arg("packing"), py::arg("a"), py::arg("normalised") = false);

    m.def(
        "seba",
        [](const Eigen::MatrixXd& V, std::optional<double> mu) {
            SebaOptions opt;
            opt.mu = mu;
            SebaResult r = seba(V, opt);
            return py::make_tuple(r.S, r.Q, r.iterations);
        },
        py::arg("V"), py::arg("mu") = py::none());

    m.def(
        "rmwec",
        [](const Eigen::MatrixXd& C) {
            CoverResult r = rmwec(C);
            return py::make_tuple(Eigen::MatrixXi(r.A), r.total);
        },
        py::arg("C"));
}
