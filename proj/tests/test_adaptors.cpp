#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "efg/adaptors.hpp"
#include "efg/solver.hpp"
#include "efg/sweep.hpp"
#include "test_util.hpp"

using namespace efg;

namespace {

struct FamilyPair {
    Tree t1, t2;
    FamilyPair(int s, int k, int m)
        : t1(build_construction(Role::T1, s, k, m)), t2(build_construction(Role::T2, s, k, m)) {}
    GameInstance game(GameVariant v) const {
        return GameInstance{BoardView::whole(t1), BoardView::whole(t2), std::move(v), {}};
    }
};

std::unique_ptr<DuplicatorStrategy> winning_batch_strategy(const GameInstance& batch_game) {
    Outcome out = solve_minimax(batch_game);
    REQUIRE(out.winner == Winner::Duplicator);
    return out.make_strategy();
}

/// A deliberately broken inner strategy for the desync paths.
class BrokenStrategy final : public DuplicatorStrategy {
public:
    std::unique_ptr<DuplicatorStrategy> clone() const override {
        return std::make_unique<BrokenStrategy>(*this);
    }
    NodeId respond(const Move&) override { return 999999; } // off every board
    std::string name() const override { return "broken"; }
};

} // namespace

TEST_CASE("fewer switches from one more batch: level-one pairs") {
    for (auto [k, sizes] : std::vector<std::pair<int, std::vector<int>>>{{1, {1}}, {2, {1, 2}}}) {
        FamilyPair p(1, k, k); // m = s*k with s = 1
        auto inner = winning_batch_strategy(p.game(FixedBatches{1, k}));

        GameInstance target = p.game(SwitchBudget{0, k});
        auto adapted = adapt_batches_to_switch_budget(target, *inner);
        SweepReport sweep = exhaustive_sweep_serial(target, *adapted);
        CHECK(sweep.losses == 0);
        CHECK(sweep.lines > 0);

        // agreement with the exact solver on the adapted game
        CHECK(solve_minimax(target).winner == Winner::Duplicator);
        (void)sizes;
    }
}

TEST_CASE("fewer switches from one more batch: the level-two pair") {
    FamilyPair p(2, 1, 2);
    auto inner = winning_batch_strategy(p.game(FixedBatches{2, 1}));

    GameInstance target = p.game(SwitchBudget{1, 1});
    auto adapted = adapt_batches_to_switch_budget(target, *inner);
    SweepReport sweep = exhaustive_sweep_serial(target, *adapted);
    CHECK(sweep.losses == 0);
    CHECK(solve_minimax(target).winner == Winner::Duplicator);
}

TEST_CASE("spoiler making no switch exercises only the first virtual batch") {
    FamilyPair p(1, 2, 2);
    auto inner = winning_batch_strategy(p.game(FixedBatches{1, 2}));
    GameInstance target = p.game(SwitchBudget{0, 2});
    auto adapted = adapt_batches_to_switch_budget(target, *inner);

    PlayState s = PlayState::initial(target);
    Move m1{Board::Right, p.t2.children(0)[0]};
    NodeId r1 = adapted->respond(m1);
    s = play_round(target, s, m1, r1);
    Move m2{Board::Right, p.t2.children(0)[1]};
    NodeId r2 = adapted->respond(m2);
    s = play_round(target, s, m2, r2);
    CHECK(check_winning(target, s.history).satisfied);
}

TEST_CASE("announced sizes from fixed batches") {
    SUBCASE("identity wrapping when every size equals k") {
        FamilyPair p(2, 1, 2);
        auto inner = winning_batch_strategy(p.game(FixedBatches{2, 1}));
        GameInstance target = p.game(BatchSizes{{1, 1}});
        auto adapted = adapt_fixed_to_sizes(target, 1, *inner);
        SweepReport sweep = exhaustive_sweep_serial(target, *adapted);
        CHECK(sweep.losses == 0);
    }

    SUBCASE("shorter announced segments win through padding") {
        FamilyPair p(1, 2, 2);
        auto inner = winning_batch_strategy(p.game(FixedBatches{1, 2}));
        GameInstance target = p.game(BatchSizes{{1}});
        auto adapted = adapt_fixed_to_sizes(target, 2, *inner);
        SweepReport sweep = exhaustive_sweep_serial(target, *adapted);
        CHECK(sweep.losses == 0);
    }

    SUBCASE("oversized segments are rejected up front") {
        FamilyPair p(1, 2, 2);
        auto inner = winning_batch_strategy(p.game(FixedBatches{1, 2}));
        GameInstance target = p.game(BatchSizes{{3, 1}});
        CHECK_THROWS_AS(adapt_fixed_to_sizes(target, 2, *inner), ParameterError);
    }
}

TEST_CASE("desync surfaces broken inner strategies") {
    FamilyPair p(1, 1, 1);
    BrokenStrategy broken;
    GameInstance target = p.game(SwitchBudget{0, 1});
    auto adapted = adapt_batches_to_switch_budget(target, broken);
    CHECK_THROWS_AS(adapted->respond(Move{Board::Left, 0}), DesyncError);
}

TEST_CASE("adaptor type checks") {
    FamilyPair p(1, 1, 1);
    BrokenStrategy broken;
    CHECK_THROWS_AS(adapt_batches_to_switch_budget(p.game(FixedBatches{1, 1}), broken),
                    ParameterError);
    CHECK_THROWS_AS(adapt_fixed_to_sizes(p.game(SwitchBudget{0, 1}), 1, broken), ParameterError);
}

TEST_CASE("virtual driver enforces segment order and lengths") {
    FamilyPair p(1, 2, 2);
    auto inner = winning_batch_strategy(p.game(FixedBatches{1, 2}));
    VirtualBatchDriver driver(p.game(FixedBatches{1, 2}), inner->clone());
    Move m{Board::Left, 0};
    CHECK_THROWS_AS(driver.respond(2, m), DesyncError); // first move must open segment 1
    driver.respond(1, m);
    driver.respond(1, m);
    CHECK_THROWS_AS(driver.respond(1, m), DesyncError); // batch length exceeded
}
