#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "efg/game.hpp"

namespace efg {

enum class Winner { Spoiler, Duplicator };

struct SolveLimits {
    int max_rounds = 6;
    int max_nodes_per_board = 200;
    long long max_board_product = 40000;
    size_t memo_cap = 10'000'000; // past this, stop inserting (lookups continue)
};

struct SolveOptions {
    /// Dedup interchangeable Spoiler moves (vertices of untouched, isomorphic
    /// sibling subtrees). Exact; A/B-tested against the unpruned search.
    bool symmetry_pruning = true;
    /// Restrict Spoiler's round-1 board, for games whose opening is known.
    std::optional<Board> forced_start_board;
};

/// Shared search state: the instance, the transposition memo, and the
/// recursive decision procedure. Extracted strategies keep it alive and
/// re-query it, so the memo is guarded for concurrent readers.
class SolverCore {
public:
    SolverCore(GameInstance g, SolveLimits limits, SolveOptions options);

    /// True iff Duplicator wins from this position under optimal play.
    /// Precondition: s.history passes check_winning.
    bool duplicator_wins(const PlayState& s);

    const GameInstance& instance() const { return game_; }
    const SolveOptions& options() const { return options_; }
    std::vector<Move> spoiler_options(const PlayState& s) const;

private:
    GameInstance game_;
    SolveLimits limits_;
    SolveOptions options_;
    CanonicalTable left_codes_, right_codes_;
    std::unordered_map<std::string, bool> memo_;
    std::mutex memo_mutex_;

    bool search(const PlayState& s);
    std::string memo_key(const PlayState& s) const;
    std::vector<Move> dedup_moves(const PlayState& s, std::vector<Move> moves) const;
};

struct Outcome {
    Winner winner = Winner::Duplicator;
    /// Spoiler-win witness: a forcing line ending in a violated history.
    std::vector<std::pair<Move, NodeId>> losing_line;
    std::shared_ptr<SolverCore> core;

    /// Duplicator-win witness: a strategy that replays the solve. Throws
    /// unless winner == Duplicator.
    std::unique_ptr<DuplicatorStrategy> make_strategy() const;
};

/// Exact winner of the instance under optimal play. Throws
/// BudgetExceededError when the instance exceeds the limits.
Outcome solve_minimax(const GameInstance& g, const SolveLimits& limits = {},
                      const SolveOptions& options = {});

/// Keeps one representative per class of interchangeable Spoiler moves:
/// vertices at the same canonical position of untouched, equal-code sibling
/// subtrees, where a board automorphism fixing the picked vertices swaps one
/// onto the other. Exact for winner computations and loss detection.
std::vector<Move> dedup_spoiler_moves(const GameInstance& g, const PlayState& s,
                                      std::vector<Move> moves, const CanonicalTable& left_codes,
                                      const CanonicalTable& right_codes);

/// Duplicator responder extracted from a winning solve: answers with the
/// lowest-id vertex that keeps the position winning.
class ExtractedStrategy final : public DuplicatorStrategy {
public:
    explicit ExtractedStrategy(std::shared_ptr<SolverCore> core);
    std::unique_ptr<DuplicatorStrategy> clone() const override {
        return std::make_unique<ExtractedStrategy>(*this);
    }
    NodeId respond(const Move& spoiler) override;
    std::string name() const override { return "minimax"; }

private:
    std::shared_ptr<SolverCore> core_;
    PlayState state_;
};

} // namespace efg
