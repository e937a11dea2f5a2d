#include <doctest.h>

#include "support/fixtures.hpp"
#include "tropgal/subgraph.hpp"

#include <random>

using namespace tropgal;
using namespace fixtures;

TEST_CASE("canonical divisor on fixtures") {
    auto g = theta();
    Divisor K = Divisor::canonical_divisor(g);
    CHECK(K.degree() == 2);
    CHECK(K.at(vertex(g, "x")) == 1);
    CHECK(K.at(vertex(g, "y")) == 1);

    auto c = circle(4);
    CHECK(Divisor::canonical_divisor(c).is_zero());

    auto b4 = banana(4);
    Divisor K4 = Divisor::canonical_divisor(b4);
    CHECK(K4.degree() == 4);
    CHECK(K4.at(vertex(b4, "x")) == 2);
    CHECK(K4.degree() == 2 * b4->genus() - 2);
}

TEST_CASE("chip firing on the whole graph is constant zero") {
    auto g = theta();
    PLFunction f = chip_firing(ClosedSubgraph::whole(g), Rat(5));
    CHECK(f.is_constant());
    CHECK(f.evaluate(vertex(g, "x")).is_zero());
}

TEST_CASE("CF({x}, 1/2) on theta: ramps and orders") {
    auto g = theta();
    ClosedSubgraph s = ClosedSubgraph::point(g, vertex(g, "x"));
    PLFunction f = chip_firing(s, Rat(1, 2));
    CHECK(f.evaluate(vertex(g, "x")).is_zero());
    CHECK(f.evaluate(vertex(g, "y")) == Rat(-1, 2));
    CHECK(f.evaluate(edge_point(g, "a", Rat(1, 4))) == Rat(-1, 4));
    CHECK(f.evaluate(edge_point(g, "a", Rat(3, 4))) == Rat(-1, 2));
    CHECK(f.ord_at(vertex(g, "x")) == -3);  // three slope -1 branches
    CHECK(f.ord_at(edge_point(g, "a", Rat(1, 2))) == 1);
    CHECK(f.ord_at(edge_point(g, "a", Rat(1, 4))) == 0);
    Divisor d = f.div();
    CHECK(d.degree() == 0);
    CHECK(d.at(vertex(g, "x")) == -3);
    CHECK(d.at(edge_point(g, "a", Rat(1, 2))) == 1);
    CHECK(d.at(edge_point(g, "b", Rat(1, 2))) == 1);
    CHECK(d.at(edge_point(g, "c", Rat(1, 2))) == 1);
}

TEST_CASE("CF({x}, 2) clamps past the farthest point") {
    auto g = theta();
    PLFunction f = chip_firing(ClosedSubgraph::point(g, vertex(g, "x")), Rat(2));
    CHECK(f.evaluate(vertex(g, "y")) == Rat(-1));
    CHECK(f.evaluate(edge_point(g, "a", Rat(1, 2))) == Rat(-1, 2));
}

TEST_CASE("constant functions have zero divisor") {
    auto g = theta();
    PLFunction f = PLFunction::constant(g, Rat(7, 3));
    CHECK(f.div().is_zero());
    CHECK(f.ord_at(vertex(g, "x")) == 0);
}

TEST_CASE("tropical operations") {
    auto g = theta();
    PLFunction f = chip_firing(ClosedSubgraph::point(g, vertex(g, "x")), Rat(1, 2));
    CHECK(tropical_add(f, f) == f);  // idempotent
    PLFunction c0 = PLFunction::constant(g, Rat(0));
    PLFunction cm1 = PLFunction::constant(g, Rat(-1));
    CHECK(tropical_add(c0, cm1) == c0);
    CHECK(tropical_scale(Rat(0), f) == f);
    CHECK(tropical_scale(Rat(5), tropical_scale(Rat(-5), f)) == f);
    CHECK(tropical_scale(Rat(5), f).div() == f.div());
    CHECK(tropical_add(f, f).div() == f.div());
    // bottom element handling
    TropElem bot;
    CHECK(tropical_add(bot, TropElem(f)) == TropElem(f));
    CHECK(!tropical_scale(Rat(3), bot).has_value());
}

TEST_CASE("max of crossing ramps introduces the crossing breakpoint") {
    auto g = MetricGraph::canonicalize(path_model(2));  // segment of length 2
    // f = distance from p0, g = distance from p2; max has a V at t = 1
    PLFunction f = chip_firing(ClosedSubgraph::point(g, vertex(g, "p0")), Rat(5)).negate();
    PLFunction h = chip_firing(ClosedSubgraph::point(g, vertex(g, "p2")), Rat(5)).negate();
    PLFunction mx = tropical_add(f, h);
    CHECK(mx.evaluate(edge_point(g, "s1", Rat(1))) == Rat(1));
    CHECK(mx.evaluate(vertex(g, "p0")) == Rat(2));
    CHECK(mx.breakpoints().size() == 1);
    CHECK(mx.breakpoints()[0].offset == Rat(1));
}

TEST_CASE("can_fire counts outgoing half-edges") {
    auto g = theta();
    Divisor d(g);
    SUBCASE("whole graph always fires") {
        CHECK(can_fire(ClosedSubgraph::whole(g), d));
    }
    SUBCASE("single vertex needs valence many chips") {
        ClosedSubgraph s = ClosedSubgraph::point(g, vertex(g, "x"));
        Divisor d3(g);
        d3.set(vertex(g, "x"), 3);
        CHECK(can_fire(s, d3));
        Divisor d2(g);
        d2.set(vertex(g, "x"), 2);
        CHECK(!can_fire(s, d2));
    }
    SUBCASE("interval boundary points need one chip each") {
        ClosedSubgraph s(g);
        s.add_interval(0, Rat(1, 4), Rat(3, 4));
        s.normalize();
        Divisor dd(g);
        dd.set(edge_point(g, "a", Rat(1, 4)), 1);
        dd.set(edge_point(g, "a", Rat(3, 4)), 1);
        CHECK(can_fire(s, dd));
        dd.set(edge_point(g, "a", Rat(3, 4)), 0);
        CHECK(!can_fire(s, dd));
    }
}

TEST_CASE("chip firing slopes lie in {-1,0} outward and range is clamped") {
    auto g = dumbbell();
    std::mt19937 rng(11);
    for (int it = 0; it < 20; ++it) {
        ClosedSubgraph s(g);
        int e = static_cast<int>(rng() % 3);
        Rat len = g->model().edges[e].length;
        Rat a = len * Rat(static_cast<long>(rng() % 4), 8);
        Rat b = a + len * Rat(1, 4);
        s.add_interval(e, a, b);
        s.normalize();
        Rat l(static_cast<long>(1 + rng() % 3), 2);
        PLFunction f = chip_firing(s, l);
        auto [mn, wh] = f.min_over_graph();
        CHECK(mn >= -l);
        CHECK(f.max_over_graph().first == Rat(0));
        for (size_t ee = 0; ee < g->model().edges.size(); ++ee) {
            auto pr = f.profile(static_cast<int>(ee));
            for (size_t i = 1; i < pr.size(); ++i) {
                Rat slope = (pr[i].second - pr[i - 1].second) / (pr[i].first - pr[i - 1].first);
                CHECK(abs(slope) <= Rat(1));
            }
        }
    }
}

TEST_CASE("decompose: constants and single chip-firing moves") {
    auto g = theta();
    auto [terms0, c0] = decompose_into_chip_firings(PLFunction::constant(g, Rat(5, 2)));
    CHECK(terms0.empty());
    CHECK(c0 == Rat(5, 2));

    PLFunction f = chip_firing(ClosedSubgraph::point(g, vertex(g, "x")), Rat(1, 2));
    auto [terms, c] = decompose_into_chip_firings(f);
    CHECK(evaluate_chip_firing_combination(g, terms, c) == f);
    CHECK(terms.size() == 1);
    CHECK(terms[0].length == Rat(1, 2));
    CHECK(terms[0].coeff == 1);
}

TEST_CASE("decompose round-trips random chip-firing combinations exactly") {
    auto g = theta();
    std::mt19937 rng(23);
    auto random_subgraph = [&]() {
        ClosedSubgraph s(g);
        bool any = false;
        for (int e = 0; e < 3; ++e) {
            if (rng() % 2) continue;
            long a8 = static_cast<long>(rng() % 6);
            long w8 = static_cast<long>(1 + rng() % (8 - a8 - 1));
            s.add_interval(e, Rat(a8, 8), Rat(a8 + w8, 8));
            any = true;
        }
        if (!any) s.add_vertex(static_cast<int>(rng() % 2));
        s.normalize();
        return s;
    };
    for (int it = 0; it < 100; ++it) {
        PLFunction f = PLFunction::constant(g, Rat(static_cast<long>(rng() % 5) - 2));
        int moves = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < moves; ++k) {
            Rat l(static_cast<long>(1 + rng() % 4), 4);
            PLFunction cf = chip_firing(random_subgraph(), l);
            long coeff = static_cast<long>(rng() % 2) + 1;
            for (long j = 0; j < coeff; ++j) f = (rng() % 4 == 0) ? f - cf : f + cf;
        }
        auto [terms, c] = decompose_into_chip_firings(f);
        CHECK(evaluate_chip_firing_combination(g, terms, c) == f);
    }
}

TEST_CASE("deg div(f) = 0 on random chip-firing combinations") {
    auto g = dumbbell();
    std::mt19937 rng(5);
    for (int it = 0; it < 40; ++it) {
        int e = static_cast<int>(rng() % 3);
        Rat len = g->model().edges[e].length;
        ClosedSubgraph s(g);
        s.add_interval(e, Rat(0), len * Rat(1, 2));
        s.normalize();
        PLFunction f = chip_firing(s, Rat(static_cast<long>(1 + rng() % 3), 2));
        ClosedSubgraph s2(g);
        s2.add_vertex(static_cast<int>(rng() % 2));
        s2.normalize();
        f = f + chip_firing(s2, Rat(static_cast<long>(1 + rng() % 2)));
        CHECK(f.div().degree() == 0);
    }
}

TEST_CASE("empty subgraph rejected by chip_firing") {
    auto g = theta();
    CHECK_THROWS_AS(chip_firing(ClosedSubgraph(g), Rat(1)), InputError);
}

TEST_CASE("superlevel sets are exact") {
    auto g = theta();
    PLFunction f = chip_firing(ClosedSubgraph::point(g, vertex(g, "x")), Rat(1, 2));
    ClosedSubgraph top = superlevel_set(f, Rat(0));
    CHECK(top.contains(vertex(g, "x")));
    CHECK(!top.contains(vertex(g, "y")));
    ClosedSubgraph half = superlevel_set(f, Rat(-1, 4));
    CHECK(half.contains(edge_point(g, "a", Rat(1, 4))));
    CHECK(!half.contains(edge_point(g, "a", Rat(3, 8))));
}
