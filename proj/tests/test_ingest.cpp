#include "stclust/error.hpp"
#include "stclust/ingest.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace stclust;

namespace {

VoteTable table(const std::string& body) {
    std::istringstream in("t,bill,voter,state,party,vote\n" + body);
    return VoteTable::read_csv(in);
}

double weight(const TemporalNetwork& net, int t, int x, int y) {
    const auto& idx = net.index();
    int i = idx.find(t, x) - idx.offset(t), j = idx.find(t, y) - idx.offset(t);
    return net.layer(t).coeff(i, j);
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("CSV parsing") {
    auto v = table("1,b1,A,NY,D,y\n1,b1,B,NY,R,N\n1,b2,\"C, Jr\",CA,D,a\n2,b1,A,NY,D,-1\n");
    REQUIRE(v.records.size() == 4u);
    CHECK(v.records[0].vote == 1);
    CHECK(v.records[1].vote == -1);
    CHECK(v.records[2].vote == 0);
    CHECK(v.records[2].voter == "C, Jr");
    CHECK(v.records[3].vote == -1);
}

TEST_CASE("CSV errors") {
    std::istringstream bad("t,bill,voter,party,state,vote\n");
    CHECK_THROWS_AS(VoteTable::read_csv(bad), ValidationError);
    CHECK_THROWS_AS(table("1,b1,A,NY,D,maybe\n"), ValidationError);
    CHECK_THROWS_AS(table("x,b1,A,NY,D,y\n"), ValidationError);
    CHECK_THROWS_AS(table("1,b1,A,NY,D,y\n1,b1,A,NY,D,n\n"), ValidationError);
    CHECK_THROWS_AS(table("1,b1,A,NY\n"), ValidationError);
    CHECK_THROWS_AS(table(""), ValidationError);
}

TEST_CASE("voter agreement weights") {
    auto v = table(
        "1,b1,A,S1,D,y\n1,b2,A,S1,D,n\n"
        "1,b1,B,S2,D,y\n1,b2,B,S2,D,y\n"
        "1,b1,C,S3,R,y\n1,b2,C,S3,R,n\n"
        "1,b3,D,S4,R,n\n"
        "2,b1,A,S1,D,y\n");
    auto s = senator_network(v);
    const auto& net = s.net;
    CHECK(s.names == std::vector<std::string>{"A", "B", "C", "D"});
    CHECK_FALSE(net.is_multiplex());
    CHECK(weight(net, 0, 0, 1) == doctest::Approx(0.5));
    CHECK(weight(net, 0, 0, 2) == 1.0);
    CHECK(weight(net, 0, 0, 3) == 0.0);
    CHECK(net.present(1) == std::vector<int>{0});
    CHECK(s.times == std::vector<int>{1, 2});
}

TEST_CASE("record order does not matter") {
    std::string rows[] = {"1,b1,A,S1,D,y\n", "1,b2,A,S1,D,n\n", "1,b1,B,S2,R,y\n", "1,b2,B,S2,R,a\n",
                          "2,b1,B,S2,R,n\n", "2,b1,A,S1,D,n\n"};
    std::string fwd, rev;
    for (int i = 0; i < 6; ++i) fwd += rows[i], rev += rows[5 - i];
    auto a = senator_network(table(fwd)), b = senator_network(table(rev));
    for (int t = 0; t < 2; ++t) CHECK(Eigen::MatrixXd(a.net.layer(t)) == Eigen::MatrixXd(b.net.layer(t)));
    auto c = state_network(table(fwd)), d = state_network(table(rev));
    for (int t = 0; t < 2; ++t) CHECK(Eigen::MatrixXd(c.net.layer(t)) == Eigen::MatrixXd(d.net.layer(t)));
}

TEST_CASE("state aggregate weights") {
    auto v = table(
        "1,b1,a1,X,D,y\n1,b1,a2,X,D,y\n"
        "1,b1,b1,Y,D,y\n1,b1,b2,Y,R,n\n"
        "1,b1,c1,Z,R,a\n1,b1,c2,Z,R,a\n"
        "1,b2,a1,X,D,a\n1,b2,b1,Y,D,a\n");
    auto s = state_network(v);
    CHECK(s.net.is_multiplex());
    SpMat L = s.net.layer(0);
    // X aggregates (2, 0), Y (0, 0), Z (0, none).
    CHECK(L.coeff(0, 1) == doctest::Approx(0.5));
    CHECK(L.coeff(1, 2) == 1.0);
    CHECK(L.coeff(0, 2) == 0.0);
    for (int k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it) {
            CHECK(it.value() >= 0.0);
            CHECK(it.value() <= 1.0);
        }
}

TEST_CASE("absent states are reported") {
    auto v = table("1,b1,a1,X,D,y\n1,b1,b1,Y,D,y\n2,b1,a1,X,D,y\n");
    try {
        state_network(v);
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("Y@t=2") != std::string::npos);
    }
}

TEST_CASE("state projection picks the most active voters") {
    auto v = table(
        "1,b1,A,X,D,y\n1,b2,A,X,D,y\n"
        "1,b1,B,X,D,y\n"
        "1,b1,C,X,D,y\n1,b2,C,X,D,n\n"
        "1,b1,D,Y,R,n\n");
    auto s = senator_network(v);
    Eigen::VectorXd F(4);
    F << 1.0, 10.0, 3.0, -2.0;
    auto p = state_projection(v, s, F);
    REQUIRE(p.size() == 2u);
    CHECK(p[0].state == "X");
    CHECK(p[0].value == doctest::Approx(2.0));
    CHECK(p[0].voters == 2);
    CHECK(p[1].value == doctest::Approx(-2.0));
    CHECK(p[1].voters == 1);
}

}
