#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "efg/game.hpp"
#include "test_util.hpp"

using namespace efg;

namespace {

struct Pair111 {
    Tree t1 = build_construction(Role::T1, 1, 1, 1);
    Tree t2 = build_construction(Role::T2, 1, 1, 1);
    GameInstance game(GameVariant v) const {
        return GameInstance{BoardView::whole(t1), BoardView::whole(t2), v, {}};
    }
};

} // namespace

TEST_CASE("variant validation and round counts") {
    CHECK(total_rounds(GameVariant{SwitchBudget{1, 3}}) == 3);
    CHECK(total_rounds(GameVariant{FixedBatches{2, 3}}) == 6);
    CHECK(total_rounds(GameVariant{BatchSizes{{1, 2, 1}}}) == 4);
    CHECK_THROWS_AS(validate_variant(GameVariant{SwitchBudget{3, 2}}), ParameterError);
    CHECK_THROWS_AS(validate_variant(GameVariant{FixedBatches{0, 2}}), ParameterError);
    CHECK_THROWS_AS(validate_variant(GameVariant{BatchSizes{{2, 0}}}), ParameterError);

    for (const char* text : {"switch:1,2", "batch:2,1", "sizes:1,2,1"}) {
        CHECK(variant_to_string(variant_from_string(text)) == text);
    }
    CHECK_THROWS_AS(variant_from_string("nope:1"), ParseError);
    CHECK_THROWS_AS(variant_from_string("batch:1"), ParseError);
    CHECK_THROWS_AS(variant_from_string("sizes:1,x"), ParseError);
}

TEST_CASE("legal spoiler moves per variant") {
    Pair111 p;

    SUBCASE("round one is free in every variant") {
        for (GameVariant v :
             {GameVariant{SwitchBudget{0, 1}}, GameVariant{FixedBatches{1, 1}},
              GameVariant{BatchSizes{{1}}}}) {
            GameInstance g = p.game(v);
            auto moves = legal_spoiler_moves(g, PlayState::initial(g));
            CHECK(moves.size() == static_cast<size_t>(p.t1.size() + p.t2.size()));
        }
    }

    SUBCASE("no switches left pins the board") {
        GameInstance g = p.game(GameVariant{SwitchBudget{0, 2}});
        PlayState s = PlayState::initial(g);
        s = play_round(g, s, Move{Board::Left, 1}, 1);
        for (const Move& m : legal_spoiler_moves(g, s)) CHECK(m.board == Board::Left);
        std::string why;
        CHECK_FALSE(is_legal_spoiler_move(g, s, Move{Board::Right, 0}, &why));
        CHECK(why == "no switches remain");
    }

    SUBCASE("batches force the switch") {
        GameInstance g = p.game(GameVariant{FixedBatches{2, 1}});
        PlayState s = PlayState::initial(g);
        s = play_round(g, s, Move{Board::Right, 1}, 1);
        auto moves = legal_spoiler_moves(g, s);
        CHECK(moves.size() == static_cast<size_t>(p.t1.size()));
        for (const Move& m : moves) CHECK(m.board == Board::Left);
    }

    SUBCASE("announced sizes schedule the boards") {
        GameInstance g = p.game(GameVariant{BatchSizes{{2, 1}}});
        PlayState s = PlayState::initial(g);
        s = play_round(g, s, Move{Board::Left, 0}, 0);
        CHECK(forced_board(g, s) == Board::Left); // still inside segment one
        s = play_round(g, s, Move{Board::Left, 1}, 1);
        CHECK(forced_board(g, s) == Board::Right);
    }

    SUBCASE("game over refuses moves") {
        GameInstance g = p.game(GameVariant{FixedBatches{1, 1}});
        PlayState s = PlayState::initial(g);
        s = play_round(g, s, Move{Board::Left, 0}, 0);
        CHECK_THROWS_AS(legal_spoiler_moves(g, s), GameOverError);
        CHECK_THROWS_AS(play_round(g, s, Move{Board::Left, 0}, 0), GameOverError);
    }
}

TEST_CASE("play_round bookkeeping and rule errors") {
    Pair111 p;
    GameInstance g = p.game(GameVariant{SwitchBudget{1, 3}});
    PlayState s = PlayState::initial(g);

    // left/right order in history does not depend on who picked where
    NodeId v2 = p.t2.children(0)[1]; // childless top child on the right board
    s = play_round(g, s, Move{Board::Right, v2}, 1);
    CHECK(s.history.back() == std::pair<NodeId, NodeId>{1, v2});
    CHECK(s.round_index == 1);
    CHECK(s.switches_used == 0);

    s = play_round(g, s, Move{Board::Left, 2}, 2);
    CHECK(s.switches_used == 1);
    CHECK(s.history.back() == std::pair<NodeId, NodeId>{2, 2});

    // duplicator must answer on the other board: vertex 99 exists nowhere
    CHECK_THROWS_AS(play_round(g, s, Move{Board::Left, 0}, 99), IllegalMoveError);
    // switch budget exhausted
    CHECK_THROWS_AS(play_round(g, s, Move{Board::Right, 0}, 0), IllegalMoveError);
}

TEST_CASE("winning conditions over the full configuration") {
    Pair111 p;
    GameInstance g = p.game(GameVariant{FixedBatches{1, 1}});
    std::vector<std::pair<NodeId, NodeId>> hist{{0, 0}};
    CHECK(check_winning(g, hist).satisfied);

    NodeId u1 = p.t1.children(0)[0];
    NodeId v2 = p.t2.children(0)[1];
    hist.emplace_back(u1, v2); // children of the roots, no equalities
    CHECK(check_winning(g, hist).satisfied);

    NodeId child_u1 = p.t1.children(u1)[0];
    NodeId v1 = p.t2.children(0)[0];
    hist.emplace_back(child_u1, v1); // parent link on the left only
    WinCheck wc = check_winning(g, hist);
    CHECK_FALSE(wc.satisfied);
    CHECK(wc.condition == "Main1");

    // equality mismatch trips the other condition
    std::vector<std::pair<NodeId, NodeId>> hist2{{0, 0}, {u1, v2}, {u1, v1}};
    WinCheck wc2 = check_winning(g, hist2);
    CHECK_FALSE(wc2.satisfied);
    CHECK(wc2.condition == "Main2");
}

TEST_CASE("violations never repair: full check equals prefix check") {
    Pair111 p;
    GameInstance g = p.game(GameVariant{SwitchBudget{2, 3}});
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<std::pair<NodeId, NodeId>> hist{{0, 0}};
        bool prefix_violated = false;
        bool incremental_violated = false;
        for (int r = 0; r < 3; ++r) {
            hist.emplace_back(static_cast<NodeId>(rng() % p.t1.size()),
                              static_cast<NodeId>(rng() % p.t2.size()));
            if (!check_winning(g, hist).satisfied) prefix_violated = true;
            if (!check_winning_last(g, hist).satisfied) incremental_violated = true;
        }
        CHECK(check_winning(g, hist).satisfied == !prefix_violated);
        CHECK(prefix_violated == incremental_violated);
    }
}

TEST_CASE("views scope the parent relation to the subtree") {
    Tree t1 = build_construction(Role::T1, 2, 1, 2);
    NodeId u1 = t1.children(0)[0];
    BoardView sub{&t1, u1};
    CHECK_FALSE(sub.parent_in_view(u1).has_value());
    CHECK(sub.contains(u1));
    CHECK_FALSE(sub.contains(0));
    CHECK(sub.size() == 8);
    CHECK(sub.vertices().size() == 8);
}

TEST_CASE("transcripts round-trip and replay") {
    Pair111 p;
    Transcript t;
    t.variant = FixedBatches{1, 1};
    t.rounds.emplace_back(Move{Board::Right, 3}, 1);
    t.result = "duplicator";

    std::string text = write_transcript(t);
    CHECK(text.find("variant=batch:1,1") != std::string::npos);
    CHECK(text.find("round=1 spoiler=R:3 duplicator=L:1") != std::string::npos);

    Transcript back = parse_transcript(text);
    CHECK(variant_to_string(back.variant) == "batch:1,1");
    REQUIRE(back.rounds.size() == 1);
    CHECK(back.rounds[0].first == Move{Board::Right, 3});
    CHECK(back.rounds[0].second == 1);

    GameInstance g = p.game(GameVariant{FixedBatches{1, 1}});
    WinCheck wc = replay_transcript(g, back);
    CHECK(wc.satisfied);

    CHECK_THROWS_AS(parse_transcript("round=1 spoiler=L:0 duplicator=R:0\n"), ParseError);
    CHECK_THROWS_AS(parse_transcript("variant=batch:1,1\nround=2 spoiler=L:0 duplicator=R:0\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_transcript("variant=batch:1,1\nround=1 spoiler=L:0 duplicator=L:0\n"),
                    ParseError);
}

TEST_CASE("designated pairs join the configuration") {
    Pair111 p;
    GameInstance g = p.game(GameVariant{FixedBatches{1, 1}});
    NodeId u1 = p.t1.children(0)[0];
    NodeId v1 = p.t2.children(0)[0];
    g.designated = {{u1, v1}};
    g.validate();
    PlayState s = PlayState::initial(g);
    REQUIRE(s.history.size() == 2);
    CHECK(s.history[1] == std::pair<NodeId, NodeId>{u1, v1});

    g.designated = {{u1, 999}};
    CHECK_THROWS_AS(g.validate(), ParameterError);
}
