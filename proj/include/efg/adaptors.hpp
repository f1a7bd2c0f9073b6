#pragma once

#include <memory>
#include <optional>

#include "efg/game.hpp"

namespace efg {

/// Replays real-game segments into the batches of a virtual fixed-batch game
/// answered by an inner Duplicator strategy. When the real game moves to a
/// new segment while the current virtual batch is not finished, the batch is
/// padded with Spoiler repeats of that board's root; the inner replies to the
/// padding are recorded in the virtual play and discarded. The real picks
/// form a subset of the virtual picks, so a winning inner strategy keeps the
/// winning conditions on everything the real game ever checks.
class VirtualBatchDriver {
public:
    /// `virtual_game` must be a FixedBatches instance. When the opening board
    /// is known ahead of play, pass it so skipped leading segments can be
    /// padded; otherwise the first fed move must belong to segment 1 and
    /// fixes the board.
    VirtualBatchDriver(GameInstance virtual_game, std::unique_ptr<DuplicatorStrategy> inner,
                       std::optional<Board> start_board = std::nullopt);
    VirtualBatchDriver(const VirtualBatchDriver& o);
    VirtualBatchDriver& operator=(const VirtualBatchDriver&) = delete;

    /// Feed the Spoiler move of real segment `segment` (1-based, weakly
    /// increasing across calls); returns the inner strategy's reply.
    NodeId respond(int segment, const Move& spoiler);

    const DuplicatorStrategy* inner() const { return inner_.get(); }
    DuplicatorStrategy* inner() { return inner_.get(); }
    int batch_length() const { return k_; }

private:
    GameInstance game_;
    int batches_ = 0;
    int k_ = 0;
    std::unique_ptr<DuplicatorStrategy> inner_;
    PlayState state_;
    std::optional<Board> start_;
    int current_segment_ = 1;

    Board segment_board(int seg) const;
    int rounds_in_current_batch() const;
    NodeId feed(const Move& spoiler);
};

/// Turns a strategy winning FixedBatches{s+1, r} into one winning
/// SwitchBudget{s, r} on the same boards: each of Spoiler's same-board runs
/// is injected into the next virtual batch. `target` must be the SwitchBudget
/// instance; `fixed_batches_winner` is cloned.
std::unique_ptr<DuplicatorStrategy> adapt_batches_to_switch_budget(
    const GameInstance& target, const DuplicatorStrategy& fixed_batches_winner);

/// Turns a strategy winning FixedBatches{s, k} into one winning
/// BatchSizes{i_1..i_s} with every i_j <= k on the same boards. `target` must
/// be the BatchSizes instance. Throws ParameterError when some i_j > k.
std::unique_ptr<DuplicatorStrategy> adapt_fixed_to_sizes(const GameInstance& target, int k,
                                                         const DuplicatorStrategy& fixed_batches_winner);

} // namespace efg
