#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "efg/strategy.hpp"
#include "efg/sweep.hpp"
#include "test_util.hpp"

using namespace efg;

namespace {

struct FamilyPair {
    Tree t1, t2;
    FamilyPair(int s, int k, int m)
        : t1(build_construction(Role::T1, s, k, m)), t2(build_construction(Role::T2, s, k, m)) {}
    GameInstance game(int s, int k) const {
        return GameInstance{BoardView::whole(t1), BoardView::whole(t2), FixedBatches{s, k}, {}};
    }
};

/// Every admissible one-pair designated configuration at (s=2, k=1, m=2),
/// generated straight from the cached subtree isomorphisms.
std::vector<std::vector<std::pair<NodeId, NodeId>>> all_one_pair_configs(const FamilyPair& p,
                                                                         PhiCache& phi) {
    std::vector<std::vector<std::pair<NodeId, NodeId>>> configs;
    const Tree& t1 = p.t1;
    const Tree& t2 = p.t2;
    NodeId dist = distinguished_child(t2, phi.codes(t2), t2.root());
    for (NodeId u : t1.children(t1.root())) {
        for (NodeId v : t2.children(t2.root())) {
            if (v == dist) continue;
            const IsoMap& iso = phi.get(t1, u, t2, v);
            for (NodeId x = u; x < u + t1.subtree_size(u); ++x)
                configs.push_back({{x, iso.apply(x)}});
        }
    }
    return configs;
}

} // namespace

TEST_CASE("distinguished child identification") {
    PhiCache phi;
    std::vector<Tree> kept; // cache entries key by address; keep the trees alive
    kept.reserve(4);
    for (int s = 1; s <= 3; ++s) {
        const Tree& t2 = kept.emplace_back(build_construction(Role::T2, s, 1, s));
        CHECK(distinguished_child(t2, phi.codes(t2), t2.root()) == t2.children(t2.root()).back());
    }
    const Tree& t1 = kept.emplace_back(build_construction(Role::T1, 1, 1, 1));
    CHECK_THROWS_AS(distinguished_child(t1, phi.codes(t1), t1.root()), ParameterError);
}

TEST_CASE("designated validation") {
    FamilyPair p(2, 1, 2);
    PhiCache phi;
    NodeId u1 = p.t1.children(0)[0];
    NodeId v1 = p.t2.children(0)[0];
    NodeId v3 = p.t2.children(0)[2]; // the distinguished child

    SUBCASE("empty is valid") {
        CHECK(validate_designated(BoardView::whole(p.t1), BoardView::whole(p.t2), 1, {}, phi).valid);
    }
    SUBCASE("an isomorphism-matched pair is valid") {
        DesignatedConfig cfg{{{u1, phi.get(p.t1, u1, p.t2, v1).apply(u1)}}};
        CHECK(validate_designated(BoardView::whole(p.t1), BoardView::whole(p.t2), 1, cfg, phi)
                  .valid);
    }
    SUBCASE("too many pairs") {
        DesignatedConfig cfg{{{u1, v1}, {u1, v1}}};
        auto v = validate_designated(BoardView::whole(p.t1), BoardView::whole(p.t2), 1, cfg, phi);
        CHECK_FALSE(v.valid);
        CHECK(v.condition == "ell<=k");
    }
    SUBCASE("distinguished-subtree placements fail the membership condition") {
        DesignatedConfig cfg{{{u1, v3}}};
        auto v = validate_designated(BoardView::whole(p.t1), BoardView::whole(p.t2), 1, cfg, phi);
        CHECK_FALSE(v.valid);
        CHECK(v.condition == "C1");
    }
    SUBCASE("root placements fail the membership condition") {
        DesignatedConfig cfg{{{p.t1.root(), v1}}};
        auto v = validate_designated(BoardView::whole(p.t1), BoardView::whole(p.t2), 1, cfg, phi);
        CHECK_FALSE(v.valid);
        CHECK(v.condition == "C1");
    }
    SUBCASE("co-location mismatches fail") {
        NodeId u2 = p.t1.children(0)[1];
        NodeId x1 = p.t1.children(u1)[0];
        NodeId x2 = p.t1.children(u2)[0];
        const IsoMap& iso = phi.get(p.t1, u1, p.t2, v1);
        const IsoMap& iso2 = phi.get(p.t1, u2, p.t2, v1);
        DesignatedConfig cfg{{{x1, iso.apply(x1)}, {x2, iso2.apply(x2)}}};
        auto v = validate_designated(BoardView::whole(p.t1), BoardView::whole(p.t2), 2, cfg, phi);
        CHECK_FALSE(v.valid);
        CHECK(v.condition == "C2");
    }
    SUBCASE("off-isomorphism pairs fail") {
        NodeId x = p.t1.children(u1)[0];
        NodeId wrong = phi.get(p.t1, u1, p.t2, v1).apply(u1); // image of the wrong vertex
        DesignatedConfig cfg{{{x, wrong}}};
        auto v = validate_designated(BoardView::whole(p.t1), BoardView::whole(p.t2), 1, cfg, phi);
        CHECK_FALSE(v.valid);
        CHECK(v.condition == "C3");
    }
}

TEST_CASE("session setup: roles and guards") {
    FamilyPair p(2, 1, 2);
    auto ctx = std::make_shared<StrategySession::Context>();
    ctx->left_tree = &p.t1;
    ctx->right_tree = &p.t2;
    ctx->k = 1;
    ctx->m = 2;
    ctx->phi = std::make_shared<PhiCache>();
    ctx->fallback = std::make_shared<FallbackCache>();

    NodeId u1 = p.t1.children(0)[0];
    NodeId u2 = p.t1.children(0)[1];
    NodeId v1 = p.t2.children(0)[0];
    DesignatedConfig cfg{{{u1, ctx->phi->get(p.t1, u1, p.t2, v1).apply(u1)}}};

    StrategySession session(ctx, BoardView::whole(p.t1), BoardView::whole(p.t2), 2, cfg,
                            Board::Right);
    // the designated pair touches the first top child, so the next one takes the role
    CHECK(session.role_left() == u2);
    CHECK(session.role_right() == p.t2.children(0).back());

    CHECK_THROWS_AS(StrategySession(ctx, BoardView::whole(p.t1), BoardView::whole(p.t2), 2, cfg,
                                    Board::Left),
                    ParameterError);
    DesignatedConfig bad{{{u1, v1}, {u1, v1}}};
    CHECK_THROWS_AS(StrategySession(ctx, BoardView::whole(p.t1), BoardView::whole(p.t2), 2, bad,
                                    Board::Right),
                    ParameterError);

    // guard: pairs touching every top-level subtree leave nothing for the
    // role. The admission conditions make this unreachable (the co-location
    // bijection caps touched subtrees at the number of usable counterparts),
    // so what must surface is a precondition violation, not a bad session.
    auto wide = std::make_shared<StrategySession::Context>(*ctx);
    wide->k = 5;
    NodeId u3 = p.t1.children(0)[2];
    NodeId v2 = p.t2.children(0)[1];
    DesignatedConfig full{{{u1, ctx->phi->get(p.t1, u1, p.t2, v1).apply(u1)},
                           {u2, ctx->phi->get(p.t1, u2, p.t2, v2).apply(u2)},
                           {u3, ctx->phi->get(p.t1, u3, p.t2, v1).apply(u3)}}};
    CHECK_THROWS_AS(StrategySession(wide, BoardView::whole(p.t1), BoardView::whole(p.t2), 2, full,
                                    Board::Right),
                    ParameterError);
}

TEST_CASE("session state dumps as json") {
    FamilyPair p(2, 1, 2);
    GameInstance g = p.game(2, 1);
    auto strat = PaperStrategy::make(g);
    strat->respond(Move{Board::Right, p.t2.children(0)[1]});
    strat->respond(Move{Board::Left, p.t1.children(0)[0]});
    REQUIRE(strat->session() != nullptr);
    std::string dump = strat->session()->dump_state_json();
    CHECK(dump.find("\"level\": 2") != std::string::npos);
    CHECK(dump.find("\"rounds_played\": 2") != std::string::npos);
    CHECK(dump.find("\"history\"") != std::string::npos);
    CHECK(dump.find("\"role_left\"") != std::string::npos);
}

TEST_CASE("level-one replies follow the written cases") {
    FamilyPair p(1, 2, 2);
    GameInstance g = p.game(1, 2);

    SUBCASE("second-board start pairs children by index") {
        auto strat = PaperStrategy::make(g);
        NodeId v2 = p.t2.children(0)[1];
        CHECK(strat->respond(Move{Board::Right, v2}) == p.t1.children(0)[1]);
        // a repeat keeps its mate
        CHECK(strat->respond(Move{Board::Right, v2}) == p.t1.children(0)[1]);
    }
    SUBCASE("second-board child picks get fresh children of the same-index mate") {
        auto strat = PaperStrategy::make(g);
        NodeId v1 = p.t2.children(0)[0];
        NodeId c1 = p.t2.children(v1)[0];
        NodeId c2 = p.t2.children(v1)[1];
        NodeId u1 = p.t1.children(0)[0];
        NodeId r1 = strat->respond(Move{Board::Right, c1});
        NodeId r2 = strat->respond(Move{Board::Right, c2});
        CHECK(r1 == p.t1.children(u1)[0]);
        CHECK(r2 == p.t1.children(u1)[1]);
        CHECK(r1 != r2);
    }
    SUBCASE("first-board start answers fresh tops with the lowest free fertile top") {
        auto strat = PaperStrategy::make(g);
        NodeId u3 = p.t1.children(0)[2];
        CHECK(strat->respond(Move{Board::Left, u3}) == p.t2.children(0)[0]);
        NodeId u1 = p.t1.children(0)[0];
        CHECK(strat->respond(Move{Board::Left, u1}) == p.t2.children(0)[1]);
    }
    SUBCASE("root picks answer root") {
        auto strat = PaperStrategy::make(g);
        CHECK(strat->respond(Move{Board::Left, p.t1.root()}) == p.t2.root());
    }
}

TEST_CASE("selfcheck reports") {
    FamilyPair p(1, 2, 2);
    GameInstance g = p.game(1, 2);
    auto strat = PaperStrategy::make(g);

    SUBCASE("fresh session passes vacuously") {
        strat->respond(Move{Board::Right, p.t2.children(0)[0]});
        auto report = strat->selfcheck();
        CHECK(report.all_pass);
        CHECK_FALSE(report.conditions.empty());
    }
    SUBCASE("a corrupted history fails at least one labeled condition") {
        strat->respond(Move{Board::Right, p.t2.children(0)[0]});
        strat->respond(Move{Board::Right, p.t2.children(p.t2.children(0)[0])[0]});
        REQUIRE(strat->session() != nullptr);
        auto hist = strat->session()->history();
        std::swap(hist[1].second, hist[2].second);
        auto report = strat->session()->selfcheck(std::span<const std::pair<NodeId, NodeId>>(hist));
        CHECK_FALSE(report.all_pass);
    }
}

TEST_CASE("strategy wrapper guards") {
    FamilyPair p(2, 1, 2);
    SUBCASE("variant must be fixed batches") {
        GameInstance g{BoardView::whole(p.t1), BoardView::whole(p.t2), SwitchBudget{1, 2}, {}};
        CHECK_THROWS_AS(PaperStrategy::make(g), ParameterError);
    }
    SUBCASE("batch count must equal the level") {
        CHECK_THROWS_AS(PaperStrategy::make(p.game(1, 1)), ParameterError);
    }
    SUBCASE("boards must be the family pair") {
        GameInstance g{BoardView::whole(p.t1), BoardView::whole(p.t1), FixedBatches{2, 1}, {}};
        CHECK_THROWS_AS(PaperStrategy::make(g), ParameterError);
    }
    SUBCASE("designated pairs force a right start") {
        NodeId u1 = p.t1.children(0)[0];
        PhiCache phi;
        NodeId y = phi.get(p.t1, u1, p.t2, p.t2.children(0)[0]).apply(u1);
        GameInstance g = p.game(2, 1);
        g.designated = {{u1, y}};
        CHECK_THROWS_AS(PaperStrategy::make(g, std::nullopt, std::nullopt, Board::Left),
                        ParameterError);
        auto strat = PaperStrategy::make(g);
        CHECK_THROWS_AS(strat->respond(Move{Board::Left, u1}), StrategyViolatedError);
    }
}

TEST_CASE("deterministic responses") {
    FamilyPair p(2, 1, 2);
    GameInstance g = p.game(2, 1);
    NodeId probe = p.t2.children(0)[1];
    std::vector<NodeId> replies;
    for (int run = 0; run < 2; ++run) {
        auto strat = PaperStrategy::make(g);
        replies.push_back(strat->respond(Move{Board::Right, probe}));
        replies.push_back(strat->respond(Move{Board::Left, p.t1.children(0)[2]}));
    }
    CHECK(replies[0] == replies[2]);
    CHECK(replies[1] == replies[3]);
}

TEST_CASE("the recursive strategy never loses: exhaustive small matrix") {
    struct Case {
        int s, k, m;
        std::uint64_t expected_lines;
    };
    for (const Case c : {Case{1, 1, 1, 9}, Case{1, 2, 2, 164}, Case{2, 1, 2, 1350}}) {
        CAPTURE(c.s);
        FamilyPair p(c.s, c.k, c.m);
        GameInstance g = p.game(c.s, c.k);
        auto strat = PaperStrategy::make(g);
        SweepOptions opts;
        opts.selfcheck_each_round = true;
        SweepReport report = exhaustive_sweep_serial(g, *strat, SweepLimits{}, opts);
        CHECK(report.lines == c.expected_lines);
        CHECK(report.losses == 0);
        CHECK(report.selfcheck_fail.empty());
        CHECK_FALSE(report.selfcheck_pass.empty());
    }
}

TEST_CASE("level-three lines that first touch the role subtrees late") {
    // regression: the recursive child game may receive its first pick in any
    // later batch, so the virtual replay must pad the skipped batches
    FamilyPair p(3, 1, 3);
    GameInstance g = p.game(3, 1);
    NodeId v_dist = p.t2.children(0).back();     // top child carrying the odd subtree
    NodeId inside_dist = p.t2.children(v_dist)[0];
    NodeId u4 = p.t1.children(0).back();
    NodeId u2 = p.t1.children(0)[1];

    auto play_line = [&](const std::vector<Move>& moves) {
        auto strat = PaperStrategy::make(g);
        PlayState s = PlayState::initial(g);
        for (const Move& mv : moves) {
            NodeId reply = strat->respond(mv);
            s = play_round(g, s, mv, reply);
            REQUIRE(check_winning_last(g, s.history).satisfied);
        }
        CHECK(check_winning(g, s.history).satisfied);
    };

    // role picks in batches 1 and 3 but not 2
    play_line({Move{Board::Right, inside_dist}, Move{Board::Left, u4},
               Move{Board::Right, p.t2.children(inside_dist)[0]}});
    // first role pick as late as batch 3
    play_line({Move{Board::Right, p.t2.children(0)[0]}, Move{Board::Left, u2},
               Move{Board::Right, inside_dist}});
    // left start, role picks skipping batch 2
    play_line({Move{Board::Left, p.t1.children(u2)[0]}, Move{Board::Right, inside_dist},
               Move{Board::Left, p.t1.children(0)[0]}});
}

TEST_CASE("designated-pair games: every admissible one-pair start is safe") {
    FamilyPair p(2, 1, 2);
    PhiCache phi;
    auto configs = all_one_pair_configs(p, phi);
    CHECK(configs.size() == 48); // 3 tops x 2 targets x 8 vertices

    std::uint64_t total_lines = 0;
    for (const auto& pairs : configs) {
        GameInstance g = p.game(2, 1);
        g.designated = pairs;
        auto strat = PaperStrategy::make(g);
        SweepOptions opts;
        opts.selfcheck_each_round = true;
        opts.forced_start_board = Board::Right;
        SweepReport report = exhaustive_sweep_serial(g, *strat, SweepLimits{}, opts);
        CHECK(report.losses == 0);
        CHECK(report.selfcheck_fail.empty());
        total_lines += report.lines;
    }
    CHECK(total_lines == 48u * 27u * 25u);
}
