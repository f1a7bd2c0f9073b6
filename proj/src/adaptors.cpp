#include "efg/adaptors.hpp"

#include <numeric>

namespace efg {

VirtualBatchDriver::VirtualBatchDriver(GameInstance virtual_game,
                                       std::unique_ptr<DuplicatorStrategy> inner,
                                       std::optional<Board> start_board)
    : game_(std::move(virtual_game)), inner_(std::move(inner)), start_(start_board) {
    const auto* fb = std::get_if<FixedBatches>(&game_.variant);
    if (!fb) throw ParameterError("virtual game must use fixed batches");
    batches_ = fb->batches;
    k_ = fb->k;
    state_ = PlayState::initial(game_);
}

VirtualBatchDriver::VirtualBatchDriver(const VirtualBatchDriver& o)
    : game_(o.game_), batches_(o.batches_), k_(o.k_), inner_(o.inner_->clone()),
      state_(o.state_), start_(o.start_), current_segment_(o.current_segment_) {}

Board VirtualBatchDriver::segment_board(int seg) const {
    return seg % 2 == 1 ? *start_ : other(*start_);
}

int VirtualBatchDriver::rounds_in_current_batch() const {
    return state_.round_index - (current_segment_ - 1) * k_;
}

NodeId VirtualBatchDriver::feed(const Move& spoiler) {
    NodeId reply;
    try {
        reply = inner_->respond(spoiler);
    } catch (const Error& e) {
        throw DesyncError(std::string("inner strategy failed mid-replay: ") + e.what());
    }
    try {
        state_ = play_round(game_, state_, spoiler, reply);
    } catch (const IllegalMoveError& e) {
        throw DesyncError(std::string("inner strategy made an illegal virtual move: ") + e.what());
    }
    return reply;
}

NodeId VirtualBatchDriver::respond(int segment, const Move& spoiler) {
    if (segment < current_segment_)
        throw DesyncError("segments must be fed in order");
    if (segment > batches_)
        throw DesyncError("more segments than the virtual game has batches");
    if (!start_) {
        if (segment != 1)
            throw DesyncError("the first fed move must open segment 1 when no start board is set");
        start_ = spoiler.board;
    }
    while (current_segment_ < segment) {
        // close the unfinished batch with root repeats
        Board b = segment_board(current_segment_);
        Move pad{b, game_.board(b).root};
        while (rounds_in_current_batch() < k_) feed(pad);
        ++current_segment_;
    }
    if (spoiler.board != segment_board(segment))
        throw DesyncError("fed move is on the wrong board for its segment");
    if (rounds_in_current_batch() >= k_)
        throw DesyncError("segment longer than the virtual batch length");
    return feed(spoiler);
}

namespace {

class SwitchBudgetAdaptor final : public DuplicatorStrategy {
public:
    SwitchBudgetAdaptor(GameInstance virtual_game, const DuplicatorStrategy& inner)
        : driver_(std::move(virtual_game), inner.clone()) {}
    SwitchBudgetAdaptor(const SwitchBudgetAdaptor&) = default;

    std::unique_ptr<DuplicatorStrategy> clone() const override {
        return std::make_unique<SwitchBudgetAdaptor>(*this);
    }

    NodeId respond(const Move& spoiler) override {
        if (!last_board_) {
            segment_ = 1;
        } else if (*last_board_ != spoiler.board) {
            ++segment_;
        }
        last_board_ = spoiler.board;
        return driver_.respond(segment_, spoiler);
    }

    std::string name() const override {
        return "switch-adapted(" + driver_.inner()->name() + ")";
    }

private:
    VirtualBatchDriver driver_;
    int segment_ = 0;
    std::optional<Board> last_board_;
};

class BatchSizesAdaptor final : public DuplicatorStrategy {
public:
    BatchSizesAdaptor(GameInstance virtual_game, std::vector<int> sizes,
                      const DuplicatorStrategy& inner)
        : driver_(std::move(virtual_game), inner.clone()), sizes_(std::move(sizes)) {}
    BatchSizesAdaptor(const BatchSizesAdaptor&) = default;

    std::unique_ptr<DuplicatorStrategy> clone() const override {
        return std::make_unique<BatchSizesAdaptor>(*this);
    }

    NodeId respond(const Move& spoiler) override {
        ++round_;
        int upto = 0, segment = 0;
        for (size_t i = 0; i < sizes_.size(); ++i) {
            upto += sizes_[i];
            if (round_ <= upto) {
                segment = static_cast<int>(i) + 1;
                break;
            }
        }
        if (segment == 0) throw DesyncError("move past the final announced segment");
        return driver_.respond(segment, spoiler);
    }

    std::string name() const override {
        return "sizes-adapted(" + driver_.inner()->name() + ")";
    }

private:
    VirtualBatchDriver driver_;
    std::vector<int> sizes_;
    int round_ = 0;
};

} // namespace

std::unique_ptr<DuplicatorStrategy> adapt_batches_to_switch_budget(
    const GameInstance& target, const DuplicatorStrategy& fixed_batches_winner) {
    const auto* sb = std::get_if<SwitchBudget>(&target.variant);
    if (!sb) throw ParameterError("target must be a switch-budget game");
    GameInstance virt = target;
    virt.variant = FixedBatches{sb->switches + 1, sb->rounds};
    return std::make_unique<SwitchBudgetAdaptor>(std::move(virt), fixed_batches_winner);
}

std::unique_ptr<DuplicatorStrategy> adapt_fixed_to_sizes(
    const GameInstance& target, int k, const DuplicatorStrategy& fixed_batches_winner) {
    const auto* bs = std::get_if<BatchSizes>(&target.variant);
    if (!bs) throw ParameterError("target must be a batch-sizes game");
    for (int size : bs->sizes)
        if (size > k)
            throw ParameterError("announced segment of length " + std::to_string(size) +
                                 " exceeds the batch length " + std::to_string(k));
    GameInstance virt = target;
    virt.variant = FixedBatches{static_cast<int>(bs->sizes.size()), k};
    return std::make_unique<BatchSizesAdaptor>(std::move(virt), bs->sizes, fixed_batches_winner);
}

} // namespace efg
