#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "efg/errors.hpp"
#include "efg/tree.hpp"

namespace efg {

enum class Board { Left, Right };

inline Board other(Board b) { return b == Board::Left ? Board::Right : Board::Left; }
inline char board_letter(Board b) { return b == Board::Left ? 'L' : 'R'; }

/// A rooted view into a tree: the game board is the subtree under `root`.
/// The view root counts as parentless even when it has a parent in the
/// enclosing tree.
struct BoardView {
    const Tree* tree = nullptr;
    NodeId root = 0;

    bool contains(NodeId v) const { return tree->valid_id(v) && tree->in_subtree(root, v); }
    std::optional<NodeId> parent_in_view(NodeId v) const {
        if (v == root) return std::nullopt;
        return tree->parent(v);
    }
    int size() const { return tree->subtree_size(root); }
    std::vector<NodeId> vertices() const;

    static BoardView whole(const Tree& t) { return BoardView{&t, t.root()}; }
};

// ---------------------------------------------------------------------------
// Variants.

/// At most `switches` board changes by Spoiler over `rounds` rounds.
struct SwitchBudget {
    int switches = 0;
    int rounds = 1;
};

/// `batches` batches of `k` rounds each; Spoiler's board is forced to
/// alternate between batches, starting wherever he opened.
struct FixedBatches {
    int batches = 1;
    int k = 1;
};

/// Segment lengths announced up front; boards alternate between segments.
struct BatchSizes {
    std::vector<int> sizes;
};

using GameVariant = std::variant<SwitchBudget, FixedBatches, BatchSizes>;

std::string variant_to_string(const GameVariant& v);
GameVariant variant_from_string(const std::string& text);
int total_rounds(const GameVariant& v);
void validate_variant(const GameVariant& v);

// ---------------------------------------------------------------------------
// Instances and play state.

struct Move {
    Board board = Board::Left;
    NodeId vertex = 0;
    bool operator==(const Move&) const = default;
};

struct GameInstance {
    BoardView left, right;
    GameVariant variant;
    std::vector<std::pair<NodeId, NodeId>> designated; // (left vertex, right vertex)

    const BoardView& board(Board b) const { return b == Board::Left ? left : right; }
    void validate() const;
    /// History prefix frozen before the first round: roots, then designated pairs.
    std::vector<std::pair<NodeId, NodeId>> initial_history() const;
};

struct PlayState {
    std::vector<std::pair<NodeId, NodeId>> history; // roots, designated, then round picks
    int round_index = 0;                            // rounds completed
    std::optional<Board> spoiler_board;             // board of Spoiler's last move
    int switches_used = 0;

    static PlayState initial(const GameInstance& g);
    bool game_over(const GameInstance& g) const { return round_index >= total_rounds(g.variant); }
};

/// Result of the winning-condition check. The two conditions are checked over
/// every index pair of the full history (roots and designated pairs
/// included); the first violating pair is reported for diagnostics.
struct WinCheck {
    bool satisfied = true;
    int i = -1, j = -1;
    std::string condition; // "Main1" or "Main2"
};

WinCheck check_winning(const GameInstance& g,
                       std::span<const std::pair<NodeId, NodeId>> history);
/// Incremental form: assumes the prefix before the last pair was clean and
/// checks only pairs involving the newest entry. Equivalent to the full check
/// because a violation never involves only older pairs once those were clean.
WinCheck check_winning_last(const GameInstance& g,
                            std::span<const std::pair<NodeId, NodeId>> history);

/// Board Spoiler must play in the next round, or nullopt when he may choose
/// (round 1 of every variant, and any SwitchBudget round with switches left).
std::optional<Board> forced_board(const GameInstance& g, const PlayState& s);

std::vector<Move> legal_spoiler_moves(const GameInstance& g, const PlayState& s);
bool is_legal_spoiler_move(const GameInstance& g, const PlayState& s, const Move& m,
                           std::string* why = nullptr);

/// Applies one full round. Throws IllegalMoveError naming the violated rule,
/// or GameOverError past the final round.
PlayState play_round(const GameInstance& g, const PlayState& s, const Move& spoiler,
                     NodeId duplicator_vertex);

// ---------------------------------------------------------------------------
// Strategies.

/// Deterministic stateful responder: feed Spoiler's move, get Duplicator's
/// vertex on the other board. Sequential contract — respond() is called once
/// per round in order; clone() snapshots the strategy mid-game so enumeration
/// drivers can branch.
class DuplicatorStrategy {
public:
    virtual ~DuplicatorStrategy() = default;
    virtual std::unique_ptr<DuplicatorStrategy> clone() const = 0;
    virtual NodeId respond(const Move& spoiler) = 0;
    virtual std::string name() const { return "strategy"; }
};

/// Answers through a fixed root-preserving isomorphism; wins on isomorphic boards.
class IsoStrategy final : public DuplicatorStrategy {
public:
    explicit IsoStrategy(IsoMap left_to_right) : iso_(std::move(left_to_right)) {}
    std::unique_ptr<DuplicatorStrategy> clone() const override {
        return std::make_unique<IsoStrategy>(*this);
    }
    NodeId respond(const Move& spoiler) override {
        return spoiler.board == Board::Left ? iso_.apply(spoiler.vertex)
                                            : iso_.invert(spoiler.vertex);
    }
    std::string name() const override { return "iso"; }

private:
    IsoMap iso_;
};

// ---------------------------------------------------------------------------
// Transcripts: line-oriented logs of played games.
//
//   variant=batch:2,1
//   designated=3:5,7:2          (absent pairs: "designated=")
//   round=1 spoiler=R:5 duplicator=L:3
//   ...
//   result=duplicator

struct Transcript {
    GameVariant variant;
    std::vector<std::pair<NodeId, NodeId>> designated;
    std::vector<std::pair<Move, NodeId>> rounds; // (spoiler move, duplicator vertex)
    std::optional<std::string> result;
};

std::string write_transcript(const Transcript& t);
Transcript parse_transcript(const std::string& text);

/// Replays a transcript against an instance, validating every move; returns
/// the final check_winning result.
WinCheck replay_transcript(const GameInstance& g, const Transcript& t);

} // namespace efg
