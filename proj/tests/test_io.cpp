#include "fixtures.hpp"
#include "stclust/error.hpp"
#include "stclust/io.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>

using namespace stclust;

TEST_SUITE("io") {

TEST_CASE("network round trip") {
    std::mt19937_64 rng(12);
    for (bool random_temporal : {false, true}) {
        auto net = fixtures::random_multiplex(rng, 5, 4, random_temporal);
        auto back = network_from_json(json::parse(network_to_json(net).dump()));
        CHECK(back.is_multiplex());
        CHECK(back.temporal_weights() == net.temporal_weights());
        for (int t = 0; t < 4; ++t) CHECK(Eigen::MatrixXd(back.layer(t)) == Eigen::MatrixXd(net.layer(t)));
    }
}

TEST_CASE("non-multiplex input") {
    auto j = json::parse(R"({"N": 3, "T": 2, "layers": [
        {"t": 1, "edges": [[1, 2, 1.0], [2, 3, 0.5]]},
        {"t": 2, "present": [3, 1], "edges": [[1, 3, 2.0]]}]})");
    auto net = network_from_json(j);
    CHECK_FALSE(net.is_multiplex());
    CHECK(net.present(1) == std::vector<int>{0, 2});
    CHECK(net.layer(1).coeff(0, 1) == 2.0);
    auto back = network_from_json(network_to_json(net));
    CHECK(back.index().size() == 5);
}

TEST_CASE("malformed networks are rejected") {
    auto bad = [](const char* s) { return network_from_json(json::parse(s)); };
    CHECK_THROWS_AS(bad(R"({"N": 2, "T": 1, "layers": [{"t": 1, "edges": [[1, 1, 1.0]]}]})"), ValidationError);
    CHECK_THROWS_AS(bad(R"({"N": 2, "T": 1, "layers": [{"t": 1, "edges": [[1, 2, 1.0], [2, 1, 1.0]]}]})"),
                    ValidationError);
    CHECK_THROWS_AS(bad(R"({"N": 2, "T": 1, "layers": [{"t": 1, "edges": [[1, 3, 1.0]]}]})"), ValidationError);
    CHECK_THROWS_AS(bad(R"({"N": 2, "T": 2, "layers": [{"t": 1}]})"), ValidationError);
    CHECK_THROWS_AS(bad(R"({"N": 2, "T": 1, "layers": [{"t": 1, "edges": [[1, 2, -1.0]]}]})"), ValidationError);
    CHECK_THROWS_AS(bad(R"({"T": 1, "layers": []})"), ValidationError);
}

TEST_CASE("packing round trip and omega inference") {
    auto net = fixtures::e0();
    Packing p = Packing::from_labels({0, 0, -1, 1});
    auto j = packing_to_json(p, net.index());
    CHECK(j["elements"][0] == json::parse("[[1,1],[1,2]]"));
    auto back = packing_from_json(j, net.index());
    CHECK(back.labels() == p.labels());
    j.erase("omega");
    CHECK(packing_from_json(j, net.index()).omega == std::vector<int>{2});
    j["K"] = 3;
    CHECK_THROWS_AS(packing_from_json(j, net.index()), ValidationError);
}

TEST_CASE("slice partitions") {
    auto a = slice_partition_from_json(json::parse("[[1,2],[3]]"));
    CHECK(a.clusters == std::vector<std::vector<int>>{{0, 1}, {2}});
    auto b = slice_partition_from_json(json::parse(R"({"clusters": [[2]], "omega": [1]})"));
    CHECK(b.omega == std::vector<int>{0});
}

TEST_CASE("CSV exports") {
    SpMat M = fixtures::layer(2, {{1, 2, 0.5}});
    auto t = triplets_csv(M);
    CHECK(t.rfind("row,col,value\n", 0) == 0);
    CHECK(t.find("1,2,0.5\n") != std::string::npos);
    CHECK(t.find("2,1,0.5\n") != std::string::npos);
    Eigen::MatrixXd F(4, 1);
    F << 1, 2, 3, 4;
    auto csv = heatmap_csv(F, fixtures::e0().index());
    CHECK(csv.find("\n1,1,2,2\n") != std::string::npos);
}

TEST_CASE("atomic writes and digests") {
    auto dir = std::filesystem::temp_directory_path() / "stclust_io_test";
    std::filesystem::create_directories(dir);
    auto path = (dir / "out.json").string();
    write_file_atomic(path, "{\"a\": 1}");
    CHECK(read_file(path) == "{\"a\": 1}");
    CHECK(read_json_file(path)["a"] == 1);
    CHECK(digest("") == "cbf29ce484222325");
    CHECK(digest("a") == "af63dc4c8601ec8c");
    CHECK_THROWS_AS(read_file((dir / "missing").string()), ValidationError);
    std::filesystem::remove_all(dir);
}

}
