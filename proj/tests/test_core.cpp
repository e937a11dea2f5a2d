#include <doctest.h>

#include "support/fixtures.hpp"
#include "tropgal/graph.hpp"
#include "tropgal/rational.hpp"

#include <random>

using namespace tropgal;
using namespace fixtures;

TEST_CASE("rational arithmetic stays canonical") {
    Rat a(1, 6), b(1, 3);
    CHECK((a + b).str() == "1/2");
    CHECK(Rat(2, 4) == Rat(1, 2));
    CHECK(Rat(-3, 6).str() == "-1/2");
    CHECK(Rat::parse("7/3") == Rat(7, 3));
    CHECK(Rat::parse("-2") == Rat(-2));
    CHECK_THROWS_AS(Rat::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Rat::parse("x"), std::invalid_argument);
    CHECK(rat_gcd(Rat(1, 2), Rat(1, 3)) == Rat(1, 6));
    CHECK(rat_gcd(Rat(2), Rat(3)) == Rat(1));
    CHECK(rat_gcd(Rat(0), Rat(5, 7)) == Rat(5, 7));
    CHECK(Rat(7, 2).floor() == 3);
    CHECK(Rat(7, 2).ceil() == 4);
    CHECK(Rat(-7, 2).floor() == -4);
}

TEST_CASE("canonical model suppresses valence-2 chains") {
    auto g = MetricGraph::canonicalize(path_model(3));
    CHECK(g->model().vertices.size() == 2);
    CHECK(g->model().edges.size() == 1);
    CHECK(g->model().edges[0].length == Rat(3));
    CHECK(g->genus() == 0);
}

TEST_CASE("theta graph is already canonical") {
    auto g = theta();
    CHECK(g->model().vertices.size() == 2);
    CHECK(g->model().edges.size() == 3);
    CHECK(g->genus() == 2);
    CHECK(g->applying_canonicalize_is_identity(g->model()));
}

TEST_CASE("circle of four arcs becomes a marked loop") {
    auto g = circle(4);
    CHECK(g->is_circle());
    CHECK(g->model().vertices.size() == 1);
    CHECK(g->model().vertices[0] == "c1");  // lexicographically-least input vertex
    CHECK(g->model().edges.size() == 1);
    CHECK(g->model().edges[0].length == Rat(4));
    CHECK(g->genus() == 1);
    // input coordinates map across the suppression
    PointRef p = g->from_input(PointRef::at_vertex(g->input_model().vertex_index("c3")));
    CHECK(!p.is_vertex());
    CHECK(p.offset == Rat(2));
}

TEST_CASE("loopless model splits loops at midpoints") {
    auto m = dumbbell_model();
    auto sub = loopless_subdivision(m);
    CHECK(!sub.child.has_loops());
    CHECK(sub.child.edges.size() == 5);
    CHECK(sub.child.vertices.size() == 4);
    Rat total;
    for (auto& e : sub.child.edges) total += e.length;
    CHECK(total == m.total_length());

    auto t = theta_model();
    auto sub2 = loopless_subdivision(t);
    CHECK(sub2.child.edges.size() == 3);  // unchanged
}

TEST_CASE("refine splits lengths exactly and is idempotent on vertices") {
    auto m = theta_model();
    auto s = refine(m, {PointRef::on_edge(0, Rat(1, 2))});
    CHECK(s.child.edges.size() == 4);
    CHECK(s.child.vertices.size() == 3);
    // lengths split exactly
    Rat sum;
    for (int ce : s.edge_pieces[0]) sum += s.child.edges[ce].length;
    CHECK(sum == Rat(1));
    // empty refinement and vertex refinement are identities
    auto s2 = refine(m, {});
    CHECK(s2.child.edges.size() == m.edges.size());
    auto s3 = refine(m, {PointRef::at_vertex(0)});
    CHECK(s3.child.edges.size() == m.edges.size());
    // genus invariant under refinement
    CHECK(s.child.genus() == m.genus());
}

TEST_CASE("genus of standard fixtures") {
    CHECK(theta()->genus() == 2);
    CHECK(banana(4)->genus() == 3);
    CHECK(MetricGraph::canonicalize(path_model(2))->genus() == 0);
    CHECK(dumbbell()->genus() == 2);
    CHECK(k4()->genus() == 3);
    CHECK(type2(3)->genus() == 3);
    CHECK(type2(4)->genus() == 4);
}

TEST_CASE("distances on the theta graph") {
    auto g = theta();
    PointRef x = vertex(g, "x"), y = vertex(g, "y");
    CHECK(g->distance(x, y) == Rat(1));
    CHECK(g->distance(x, x) == Rat(0));
    CHECK(g->distance(edge_point(g, "a", Rat(1, 2)), y) == Rat(1, 2));
    // midpoints of two parallel edges: across either endpoint
    CHECK(g->distance(edge_point(g, "a", Rat(1, 2)), edge_point(g, "b", Rat(1, 2))) == Rat(1));
}

TEST_CASE("distance is a metric on random point triples") {
    auto g = dumbbell();
    std::mt19937 rng(7);
    auto random_point = [&]() {
        int e = static_cast<int>(rng() % g->model().edges.size());
        long num = static_cast<long>(rng() % 8);
        Rat t = g->model().edges[e].length * Rat(num, 8);
        return normalize_point(g->model(), e, t);
    };
    for (int it = 0; it < 60; ++it) {
        PointRef a = random_point(), b = random_point(), c = random_point();
        Rat ab = g->distance(a, b), ba = g->distance(b, a);
        CHECK(ab == ba);
        CHECK(ab >= Rat(0));
        if (a == b) CHECK(ab.is_zero());
        if (!(a == b)) CHECK(ab > Rat(0));
        CHECK(g->distance(a, c) <= ab + g->distance(b, c));
    }
}

TEST_CASE("disconnected and degenerate models are rejected") {
    Model m;
    m.vertices = {"a", "b"};
    CHECK_THROWS_AS(MetricGraph::canonicalize(m), InputError);
    Model m2;
    m2.vertices = {"a", "b"};
    m2.edges = {{"e", 0, 1, Rat(0)}};
    CHECK_THROWS_AS(MetricGraph::canonicalize(m2), InputError);
}

TEST_CASE("singleton graph is accepted") {
    Model m;
    m.vertices = {"pt"};
    auto g = MetricGraph::canonicalize(m);
    CHECK(g->genus() == 0);
    CHECK(g->num_edges() == 0);
}

TEST_CASE("marking locates points and rebuilds models") {
    auto g = theta();
    Marking mk(g, {edge_point(g, "a", Rat(1, 2)), edge_point(g, "b", Rat(1, 4))});
    CHECK(mk.num_nodes() == 4);
    CHECK(mk.num_cells() == 5);
    Model m = mk.to_model();
    CHECK(m.genus() == 2);
    int node, cell;
    mk.locate(edge_point(g, "a", Rat(1, 2)), node, cell);
    CHECK(node >= 0);
    mk.locate(edge_point(g, "a", Rat(1, 3)), node, cell);
    CHECK(node == -1);
    CHECK(cell >= 0);
}
