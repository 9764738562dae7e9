#include <doctest.h>

#include "brute.hpp"
#include "mugame/error.hpp"
#include "mugame/game.hpp"
#include "mugame/generate.hpp"

#include <algorithm>
#include <string>

using namespace mugame;

namespace {

ParityGame single_vertex(Player owner, unsigned prio, bool self_loop) {
    ParityGame g;
    VertexId v = g.arena.add_vertex();
    g.owner[v] = owner;
    g.priority[v] = prio;
    if (self_loop) g.arena.add_edge(v, v);
    g.initial = v;
    g.priority_bound = prio;
    return g;
}

} // namespace

TEST_CASE("pg files parse and reprint byte for byte") {
    const char* files[] = {
        "parity 0;\n0 0 1;\n",
        "parity 1;\n0 1 0 1,0;\n1 0 1;\n",
        "parity 2;\n0 3 0 1;\n1 2 1 0,0,2;\n2 0 0 \"var:A\";\n",
        "parity 1;\nstart 1;\n0 0 0 1;\n1 2 1 0;\n",
    };
    for (const char* f : files) {
        CAPTURE(f);
        ParityGame g = parse_game(f);
        CHECK(print_game(g) == f);
    }

    SUBCASE("start line is omitted exactly when initial is the smallest id") {
        ParityGame g = parse_game("parity 1;\nstart 0;\n0 1 0 1;\n1 0 1;\n");
        CHECK(print_game(g) == "parity 1;\n0 1 0 1;\n1 0 1;\n");
    }

    SUBCASE("forward references and sparse ids are accepted") {
        ParityGame g = parse_game("parity 9;\n3 1 0 9;\n9 0 1 3;\n");
        CHECK(g.arena.vertex_count() == 2);
        // smallest id is initial, so no start line reappears
        CHECK(g.initial == VertexId{3});
        CHECK(print_game(g) == "parity 9;\n3 1 0 9;\n9 0 1 3;\n");
    }
}

TEST_CASE("pg parse errors") {
    CHECK_THROWS_AS(parse_game(""), ParseError);                      // no vertices
    CHECK_THROWS_AS(parse_game("0 0 1\n"), ParseError);               // missing ';'
    CHECK_THROWS_AS(parse_game("parity 1;\n0 0 2 0;\n"), ParseError); // bad owner
    CHECK_THROWS_AS(parse_game("parity 1;\n0 0 1;\n0 1 1;\n"), ParseError); // duplicate id
    CHECK_THROWS_AS(parse_game("parity 0;\n0 0 1 1;\n"), ParseError); // dangling successor
    CHECK_THROWS_AS(parse_game("parity 0;\n0 0 1;\n5 0 1;\n"), ParseError); // header too low
    CHECK_THROWS_AS(parse_game("0 0 0 1 \"var:A\";\n1 0 1;\n"), ParseError); // label with moves
    CHECK_THROWS_AS(parse_game("0 0 0 \"A\";\n"), ParseError);        // label missing var: prefix
    CHECK_THROWS_AS(parse_game("start 7;\n0 0 1;\n"), ParseError);    // start at unknown vertex

    SUBCASE("positions are reported") {
        try {
            parse_game("parity 1;\n0 0 1;\nnonsense here;\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
}

TEST_CASE("game validation collects every problem") {
    SUBCASE("empty arena") {
        ParityGame g;
        try {
            validate_game(g);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("no initial position") != std::string::npos);
        }
    }

    SUBCASE("labeled vertex with a move, missing owner, oversized priority") {
        ParityGame g;
        VertexId a = g.arena.add_vertex();
        VertexId b = g.arena.add_vertex();
        g.arena.add_edge(a, b);
        g.initial = a;
        g.owner[a] = Player::Eva;
        g.priority[a] = 5; // above the bound
        g.priority_bound = 3;
        g.var_label[a] = "L"; // labeled but has an edge
        // b has no owner and no priority at all
        try {
            validate_game(g);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            std::string msg = e.what();
            CHECK(msg.find("label") != std::string::npos);
            CHECK(msg.find("owner") != std::string::npos);
            CHECK(msg.find("priority") != std::string::npos);
        }
    }

    SUBCASE("well-formed game passes") {
        CHECK_NOTHROW(validate_game(single_vertex(Player::Eva, 0, true)));
    }
}

TEST_CASE("restriction keeps ids and edge order") {
    ParityGame g = parse_game("parity 2;\n0 0 0 1,2;\n1 1 1 2,0;\n2 2 0 2;\n");
    ParityGame r = restrict_game(g, {VertexId{1}, VertexId{2}});
    CHECK(r.arena.vertices() == std::vector<VertexId>{VertexId{1}, VertexId{2}});
    // 1 kept only its edge to 2; the edge back to 0 is gone
    CHECK(r.arena.out_edges(VertexId{1}).size() == 1);
    CHECK(r.arena.tgt(r.arena.out_edges(VertexId{1})[0]) == VertexId{2});
    // dropped initial falls back to the smallest survivor
    CHECK(r.initial == VertexId{1});
    CHECK_NOTHROW(validate_game(r));
}

TEST_CASE("attractor") {
    // a -> b -> c, plus Adam vertex d -> b and d -> c
    ParityGame g = parse_game("parity 3;\n0 0 0 1;\n1 0 0 2;\n2 0 0 2;\n3 0 1 1,2;\n");

    SUBCASE("empty target attracts nothing") {
        CHECK(attractor(g, Player::Eva, {}).empty());
        CHECK(attractor(g, Player::Adam, {}).empty());
    }

    SUBCASE("full target attracts everything") {
        std::set<VertexId> all{VertexId{0}, VertexId{1}, VertexId{2}, VertexId{3}};
        CHECK(attractor(g, Player::Eva, all) == all);
    }

    SUBCASE("one forcing step along a chain") {
        std::set<VertexId> got = attractor(g, Player::Eva, {VertexId{1}});
        // 0 is Eva's and moves to 1; 3 is Adam's and can escape to 2
        CHECK(got == std::set<VertexId>{VertexId{0}, VertexId{1}});
        // for Adam the d vertex joins since both its moves may be used
        std::set<VertexId> adam = attractor(g, Player::Adam, {VertexId{1}, VertexId{2}});
        CHECK(adam.count(VertexId{3}) == 1);
    }

    SUBCASE("opponent dead ends are never attracted") {
        ParityGame h = parse_game("parity 1;\n0 0 1;\n1 0 0 0;\n");
        // 0 is an Adam dead end; Eva attracting to {0} picks up 1 but not 0's
        // nonexistent moves
        std::set<VertexId> got = attractor(h, Player::Eva, {VertexId{0}});
        CHECK(got == std::set<VertexId>{VertexId{0}, VertexId{1}});
        // Adam cannot force anything into the empty set through a dead end
        CHECK(attractor(h, Player::Adam, {}).empty());
    }
}

TEST_CASE("solver on one-vertex games") {
    SUBCASE("even self-loop is Eva's") {
        WinningRegions w = zielonka_solve(single_vertex(Player::Eva, 0, true));
        CHECK(w.eva_region == std::set<VertexId>{VertexId{0}});
        CHECK(w.adam_region.empty());
        REQUIRE(w.eva_strategy.count(VertexId{0}) == 1);
    }
    SUBCASE("odd self-loop is Adam's even on Eva's vertex") {
        WinningRegions w = zielonka_solve(single_vertex(Player::Eva, 1, true));
        CHECK(w.adam_region == std::set<VertexId>{VertexId{0}});
        CHECK(w.eva_strategy.empty());
    }
    SUBCASE("dead ends lose for their owner") {
        CHECK(zielonka_solve(single_vertex(Player::Eva, 0, false)).adam_region.size() == 1);
        CHECK(zielonka_solve(single_vertex(Player::Adam, 4, false)).eva_region.size() == 1);
    }
}

TEST_CASE("solver honors leaf assumptions") {
    ParityGame g = parse_game("parity 1;\n0 1 0 1;\n1 0 0 \"var:L\";\n");
    WinningRegions win = zielonka_solve(g, {{"L", LeafAssumption::Win}});
    CHECK(win.eva_region == std::set<VertexId>{VertexId{0}});
    WinningRegions lose = zielonka_solve(g, {{"L", LeafAssumption::Lose}});
    CHECK(lose.adam_region == std::set<VertexId>{VertexId{0}});

    SUBCASE("labels never appear in regions") {
        CHECK(win.eva_region.count(VertexId{1}) == 0);
        CHECK(win.adam_region.count(VertexId{1}) == 0);
    }

    SUBCASE("missing assumptions are rejected") {
        CHECK_THROWS_AS(zielonka_solve(g), ValidationError);
        CHECK_THROWS_AS(zielonka_solve(g, {{"M", LeafAssumption::Win}}), ValidationError);
    }
}

TEST_CASE("solver strategies win when simulated") {
    // Following Eva's strategy from her region must never reach an Eva dead
    // end or an odd-topped cycle; walk each pointer chain far enough to close
    // a cycle and inspect it.
    for (unsigned seed = 0; seed < 60; ++seed) {
        Rng rng(1300 + seed);
        GameGenOptions opt;
        opt.max_vertices = 6;
        ParityGame g = random_game(rng, opt);
        WinningRegions w = zielonka_solve(g);
        for (VertexId v0 : w.eva_region) {
            // deterministic walk: Eva follows her strategy, Adam takes his
            // first listed move; every visited vertex must stay in the region
            std::vector<VertexId> trail;
            std::map<VertexId, std::size_t> seen;
            VertexId v = v0;
            bool ended_at_dead_end = false;
            for (;;) {
                if (seen.count(v)) break;
                seen[v] = trail.size();
                trail.push_back(v);
                REQUIRE(w.eva_region.count(v) == 1);
                const auto& outs = g.arena.out_edges(v);
                if (outs.empty()) {
                    REQUIRE(g.owner.at(v) == Player::Adam);
                    ended_at_dead_end = true;
                    break;
                }
                EdgeId e = g.owner.at(v) == Player::Eva ? w.eva_strategy.at(v) : outs.front();
                v = g.arena.tgt(e);
            }
            if (!ended_at_dead_end) {
                unsigned top = 0;
                for (std::size_t i = seen[v]; i < trail.size(); ++i)
                    top = std::max(top, g.priority.at(trail[i]));
                CHECK(top % 2 == 0);
            }
        }
    }
}

TEST_CASE("raising an even priority in Eva's region never shrinks it") {
    unsigned flips = 0;
    for (unsigned seed = 0; seed < 50; ++seed) {
        Rng rng(1400 + seed);
        GameGenOptions opt;
        opt.max_vertices = 6;
        opt.max_priority = 4;
        ParityGame g = random_game(rng, opt);
        WinningRegions before = zielonka_solve(g);
        for (VertexId v : before.eva_region) {
            if (g.priority.at(v) % 2 != 0) continue;
            ParityGame raised = g;
            raised.priority[v] = g.priority.at(v) + 2;
            raised.priority_bound = std::max(raised.priority_bound, raised.priority[v]);
            WinningRegions after = zielonka_solve(raised);
            CHECK(std::includes(after.eva_region.begin(), after.eva_region.end(),
                                before.eva_region.begin(), before.eva_region.end()));
            ++flips;
            break;
        }
    }
    CHECK(flips > 10);
}

TEST_CASE("solver matches the brute force oracle") {
    for (unsigned seed = 0; seed < 200; ++seed) {
        Rng rng(1500 + seed);
        GameGenOptions opt;
        opt.min_vertices = 1;
        opt.max_vertices = 5;
        opt.max_priority = 4;
        opt.label_count = seed % 5 == 4 ? 1 : 0;
        ParityGame g = random_game(rng, opt);
        std::map<std::string, LeafAssumption> assume;
        for (const auto& [v, name] : g.var_label)
            assume[name] = rng.coin() ? LeafAssumption::Win : LeafAssumption::Lose;
        WinningRegions fast = zielonka_solve(g, assume);
        WinningRegions slow = mugame::testing::brute_force_regions(g, assume);
        CAPTURE(seed);
        CAPTURE(print_game(g));
        CHECK(fast.eva_region == slow.eva_region);
        CHECK(fast.adam_region == slow.adam_region);
    }
}

TEST_CASE("golden regression game") {
    // Six vertices exercising every feature at once: a labeled leaf, a dead
    // end, a multi-edge, and an odd/even cycle contest. Regions fixed by the
    // brute force oracle when this test was written.
    ParityGame g = parse_game("parity 5;\n"
                              "0 3 0 1,2;\n"
                              "1 4 1 0,3;\n"
                              "2 1 1 2,4;\n"
                              "3 0 1;\n"
                              "4 2 0 0,0;\n"
                              "5 0 0 \"var:L\";\n");
    WinningRegions w = zielonka_solve(g, {{"L", LeafAssumption::Lose}});
    WinningRegions b = mugame::testing::brute_force_regions(g, {{"L", LeafAssumption::Lose}});
    std::set<VertexId> expect_eva{VertexId{0}, VertexId{1}, VertexId{3}, VertexId{4}};
    std::set<VertexId> expect_adam{VertexId{2}};
    CHECK(w.eva_region == expect_eva);
    CHECK(w.adam_region == expect_adam);
    CHECK(b.eva_region == expect_eva);
    CHECK(b.adam_region == expect_adam);
}
