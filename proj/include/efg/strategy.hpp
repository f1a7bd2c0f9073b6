#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "efg/game.hpp"
#include "efg/solver.hpp"

namespace efg {

/// Pre-placed (left vertex, right vertex) pairs handed to the players before
/// the first round.
struct DesignatedConfig {
    std::vector<std::pair<NodeId, NodeId>> pairs;
};

/// Lazily built, cached root-preserving isomorphisms between subtrees,
/// keyed by (source tree, source root, target tree, target root). The maps
/// come from construction_isomorphism, so querying the reversed direction
/// yields the exact inverse map. Guarded for concurrent sessions. Every tree
/// handed in must outlive the cache: entries are keyed by address.
class PhiCache {
public:
    const IsoMap& get(const Tree& src, NodeId src_root, const Tree& dst, NodeId dst_root);
    const CanonicalTable& codes(const Tree& t);

private:
    std::mutex mutex_;
    std::map<std::tuple<const Tree*, NodeId, const Tree*, NodeId>, std::unique_ptr<IsoMap>> maps_;
    std::map<const Tree*, std::unique_ptr<CanonicalTable>> codes_;
};

/// Shared solver cores for the positions the recursive strategy hands to the
/// exact solver (level-1 games that start with designated pairs).
class FallbackCache {
public:
    /// Solves the instance once (Spoiler's opening board fixed) and caches the
    /// core. Throws StrategyViolatedError if Spoiler wins it.
    std::shared_ptr<SolverCore> winning_core(const GameInstance& g, Board spoiler_start);

private:
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<SolverCore>> cores_;
};

/// The child of `root` whose subtree differs from its siblings': the unique
/// minority canonical code, or, for the bottom shapes, the unique childless
/// child. This is the structurally distinguished last child of the family's
/// second tree.
NodeId distinguished_child(const Tree& tree, const CanonicalTable& codes, NodeId root);

struct Validation {
    bool valid = true;
    std::string condition; // failing condition label when invalid
    std::string reason;
};

/// Checks the admission conditions for designated pairs on a level-s board
/// pair: every pair sits inside top-level subtrees (right side away from the
/// distinguished child), co-location matches both ways, and each pair is the
/// image of its mate under the cached subtree isomorphism.
Validation validate_designated(const BoardView& left, const BoardView& right, int k,
                               const DesignatedConfig& cfg, PhiCache& phi);

struct SelfcheckReport {
    std::vector<std::pair<std::string, bool>> conditions;
    bool all_pass = true;
    std::string detail; // first failure, for diagnostics
};

/// One play of the recursive Duplicator strategy for fixed-batch games on a
/// level-s board pair. Stateful and single-threaded; copyable so enumeration
/// drivers can branch; distinct copies share only the immutable caches.
class StrategySession {
public:
    struct Context {
        const Tree* left_tree = nullptr;
        const Tree* right_tree = nullptr;
        int k = 1;
        int m = 1;
        std::shared_ptr<PhiCache> phi;
        std::shared_ptr<FallbackCache> fallback;
    };

    /// Right-start sessions may carry designated pairs (validated here);
    /// left-start sessions must not. Throws ParameterError on bad input and
    /// StrategyViolatedError when no case of the strategy applies later.
    StrategySession(std::shared_ptr<const Context> ctx, BoardView left, BoardView right, int s,
                    DesignatedConfig designated, Board spoiler_start);
    StrategySession(const StrategySession& o);
    StrategySession(StrategySession&&) noexcept;
    StrategySession& operator=(const StrategySession&) = delete;
    ~StrategySession();

    /// Duplicator's reply; `spoiler.board` refers to this session's boards.
    NodeId respond(const Move& spoiler);

    /// Re-derives every condition of the current phase from the raw history
    /// (or an injected override, for tests) and reports pass/fail per label.
    SelfcheckReport selfcheck(
        std::optional<std::span<const std::pair<NodeId, NodeId>>> history_override =
            std::nullopt) const;

    /// Tracker state as JSON, for debugging; nested sessions recurse.
    std::string dump_state_json() const;

    int level() const { return s_; }
    int rounds_played() const { return rounds_; }
    std::optional<NodeId> role_left() const { return role_left_; }
    std::optional<NodeId> role_right() const { return role_right_; }
    const std::vector<std::pair<NodeId, NodeId>>& history() const { return history_; }

private:
    struct ChildGame;

    std::shared_ptr<const Context> ctx_;
    BoardView left_, right_;
    int s_;
    int ell_; // designated pair count
    Board start_;
    std::vector<std::pair<NodeId, NodeId>> history_; // roots, designated, picks
    int rounds_ = 0;
    std::optional<NodeId> role_left_;
    std::optional<NodeId> role_right_; // the distinguished right child (levels >= 2)
    std::unique_ptr<ChildGame> child_;

    Board expected_board(int round) const;
    int batch_of_round(int round) const { return (round - 1) / ctx_->k + 1; }

    NodeId respond_base(const Move& spoiler);
    NodeId respond_first_batch(const Move& spoiler);
    NodeId respond_second_part(const Move& spoiler, int batch);
    NodeId delegate_to_child(const Move& spoiler, int batch);
    void ensure_role_assigned();

    // history scans
    std::optional<size_t> find_left(NodeId x) const;
    std::optional<size_t> find_right(NodeId y) const;
    bool left_subtree_touched(NodeId top) const;
    bool right_subtree_touched(NodeId top) const;
    std::optional<size_t> pair_with_left_in(NodeId top) const;
    std::optional<size_t> pair_with_right_in(NodeId top) const;

    const IsoMap& phi_top(NodeId left_top, NodeId right_top) const;

    void check_conditions(std::span<const std::pair<NodeId, NodeId>> hist,
                          SelfcheckReport& report) const;
    void check_base_conditions(std::span<const std::pair<NodeId, NodeId>> hist,
                               SelfcheckReport& report) const;
};

/// Public wrapper: the recursive strategy as a DuplicatorStrategy for a
/// FixedBatches instance on a construction pair. Validates that the boards
/// really are T1/T2 of the claimed parameters. Level-1 games that carry
/// designated pairs are answered by a solver-extracted strategy instead (the
/// recursion bottoms out there), which the caches share across clones.
class PaperStrategy final : public DuplicatorStrategy {
public:
    /// `s`/`m` default from the left board's blueprint.
    static std::unique_ptr<PaperStrategy> make(const GameInstance& g,
                                               std::optional<int> s = std::nullopt,
                                               std::optional<int> m = std::nullopt,
                                               std::optional<Board> start_hint = std::nullopt);

    PaperStrategy(const PaperStrategy& o);
    std::unique_ptr<DuplicatorStrategy> clone() const override {
        return std::unique_ptr<DuplicatorStrategy>(new PaperStrategy(*this));
    }
    NodeId respond(const Move& spoiler) override;
    std::string name() const override { return "paper"; }

    /// Null before the first move (and always null for the fallback form).
    const StrategySession* session() const { return session_.get(); }
    SelfcheckReport selfcheck() const;

private:
    PaperStrategy() = default;

    std::shared_ptr<const StrategySession::Context> ctx_;
    GameInstance game_;
    int s_ = 1;
    std::optional<Board> start_;
    std::unique_ptr<StrategySession> session_;
    std::unique_ptr<DuplicatorStrategy> fallback_;

    void ensure_session(Board first_board);
};

} // namespace efg
