#include "efg/solver.hpp"

#include <algorithm>
#include <map>

namespace efg {

SolverCore::SolverCore(GameInstance g, SolveLimits limits, SolveOptions options)
    : game_(std::move(g)), limits_(limits), options_(options), left_codes_(*game_.left.tree),
      right_codes_(*game_.right.tree) {
    game_.validate();
    const int rounds = total_rounds(game_.variant);
    if (rounds > limits_.max_rounds)
        throw BudgetExceededError("instance has " + std::to_string(rounds) +
                                  " rounds, limit is " + std::to_string(limits_.max_rounds));
    const long long nl = game_.left.size(), nr = game_.right.size();
    if (nl > limits_.max_nodes_per_board || nr > limits_.max_nodes_per_board)
        throw BudgetExceededError("board size exceeds the per-board limit");
    if (nl * nr > limits_.max_board_product)
        throw BudgetExceededError("board size product exceeds the limit");
}

std::string SolverCore::memo_key(const PlayState& s) const {
    std::string key;
    key.reserve(16 + s.history.size() * 12);
    key += std::to_string(s.round_index);
    key += '|';
    key += s.spoiler_board ? board_letter(*s.spoiler_board) : '-';
    key += '|';
    key += std::to_string(s.switches_used);
    key += '|';
    const size_t fixed = 1 + game_.designated.size(); // same prefix in every state
    for (size_t i = fixed; i < s.history.size(); ++i) {
        key += std::to_string(s.history[i].first);
        key += ',';
        key += std::to_string(s.history[i].second);
        key += ';';
    }
    return key;
}

std::vector<Move> SolverCore::spoiler_options(const PlayState& s) const {
    std::vector<Move> moves = legal_spoiler_moves(game_, s);
    if (s.round_index == 0 && options_.forced_start_board) {
        std::erase_if(moves, [&](const Move& m) { return m.board != *options_.forced_start_board; });
    }
    if (options_.symmetry_pruning) moves = dedup_moves(s, std::move(moves));
    return moves;
}

// Two candidate vertices are interchangeable when a board automorphism that
// fixes every previously picked vertex maps one to the other. Witness: both
// lie at the same canonical position inside untouched sibling subtrees with
// equal canonical codes.
std::vector<Move> dedup_spoiler_moves(const GameInstance& g, const PlayState& s,
                                      std::vector<Move> moves, const CanonicalTable& left_codes,
                                      const CanonicalTable& right_codes) {
    std::map<std::string, Move> classes;
    std::vector<Move> unique_moves;
    for (const Move& m : moves) {
        const BoardView& view = g.board(m.board);
        const CanonicalTable& codes = m.board == Board::Left ? left_codes : right_codes;
        const Tree& tree = *view.tree;
        // picked vertices on this board
        auto picked_in = [&](NodeId anc) {
            for (const auto& [x, y] : s.history) {
                NodeId h = m.board == Board::Left ? x : y;
                if (tree.in_subtree(anc, h)) return true;
            }
            return false;
        };
        // highest untouched ancestor of the candidate (view root is always
        // touched: the root pair sits at history index 0)
        std::vector<NodeId> path; // view root -> ... -> m.vertex
        for (NodeId v = m.vertex;; v = *view.parent_in_view(v)) {
            path.push_back(v);
            if (v == view.root) break;
        }
        std::reverse(path.begin(), path.end());
        NodeId anchor = -1;
        size_t anchor_depth = 0;
        for (size_t d = 0; d < path.size(); ++d) {
            if (!picked_in(path[d])) {
                anchor = path[d];
                anchor_depth = d;
                break;
            }
        }
        if (anchor < 0) {
            unique_moves.push_back(m); // touched all the way down: class of its own
            continue;
        }
        std::string sig;
        sig += board_letter(m.board);
        sig += '|';
        sig += std::to_string(*view.parent_in_view(anchor));
        sig += '|';
        sig += codes.code(anchor);
        for (size_t d = anchor_depth; d + 1 < path.size(); ++d) {
            NodeId child = path[d + 1];
            const auto& siblings = tree.children(path[d]);
            int rank = 0;
            for (NodeId sib : siblings)
                if (codes.code(sib) == codes.code(child) && sib < child) ++rank;
            sig += '/';
            sig += codes.code(child);
            sig += '#';
            sig += std::to_string(rank);
        }
        auto [it, inserted] = classes.emplace(sig, m);
        if (inserted) unique_moves.push_back(m);
    }
    return unique_moves;
}

std::vector<Move> SolverCore::dedup_moves(const PlayState& s, std::vector<Move> moves) const {
    return dedup_spoiler_moves(game_, s, std::move(moves), left_codes_, right_codes_);
}

bool SolverCore::search(const PlayState& s) {
    if (s.game_over(game_)) return true; // clean full history: Duplicator wins
    const std::string key = memo_key(s);
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    bool dup_wins = true;
    for (const Move& m : spoiler_options(s)) {
        bool answered = false;
        for (NodeId reply : game_.board(other(m.board)).vertices()) {
            PlayState next = play_round(game_, s, m, reply);
            if (!check_winning_last(game_, next.history).satisfied) continue;
            if (search(next)) {
                answered = true;
                break;
            }
        }
        if (!answered) {
            dup_wins = false;
            break;
        }
    }
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        if (memo_.size() < limits_.memo_cap) memo_.emplace(key, dup_wins);
    }
    return dup_wins;
}

bool SolverCore::duplicator_wins(const PlayState& s) { return search(s); }

namespace {

// Deterministic forcing line from a Spoiler-winning position: Spoiler takes
// the first move that defeats every reply; Duplicator resists with the first
// clean reply while one exists. Ends at the first violated history.
void extract_losing_line(SolverCore& core, PlayState s,
                         std::vector<std::pair<Move, NodeId>>& line) {
    const GameInstance& g = core.instance();
    while (!s.game_over(g)) {
        Move winning{};
        bool found = false;
        for (const Move& m : core.spoiler_options(s)) {
            bool all_replies_lose = true;
            for (NodeId reply : g.board(other(m.board)).vertices()) {
                PlayState next = play_round(g, s, m, reply);
                if (check_winning_last(g, next.history).satisfied && core.duplicator_wins(next)) {
                    all_replies_lose = false;
                    break;
                }
            }
            if (all_replies_lose) {
                winning = m;
                found = true;
                break;
            }
        }
        if (!found) throw Error("internal: no forcing move from a Spoiler-winning position");
        NodeId chosen = -1;
        bool clean = false;
        for (NodeId reply : g.board(other(winning.board)).vertices()) {
            PlayState next = play_round(g, s, winning, reply);
            if (check_winning_last(g, next.history).satisfied) {
                chosen = reply;
                clean = true;
                break;
            }
            if (chosen < 0) chosen = reply;
        }
        line.emplace_back(winning, chosen);
        s = play_round(g, s, winning, chosen);
        if (!clean) return; // violation on the board; the line is complete
    }
}

} // namespace

Outcome solve_minimax(const GameInstance& g, const SolveLimits& limits,
                      const SolveOptions& options) {
    auto core = std::make_shared<SolverCore>(g, limits, options);
    Outcome out;
    out.core = core;
    PlayState start = PlayState::initial(g);
    if (!check_winning(g, start.history).satisfied) {
        // designated pairs already violate: an immediate Spoiler win
        out.winner = Winner::Spoiler;
        return out;
    }
    if (core->duplicator_wins(start)) {
        out.winner = Winner::Duplicator;
    } else {
        out.winner = Winner::Spoiler;
        extract_losing_line(*core, start, out.losing_line);
    }
    return out;
}

std::unique_ptr<DuplicatorStrategy> Outcome::make_strategy() const {
    if (winner != Winner::Duplicator)
        throw Error("no Duplicator strategy: Spoiler wins this instance");
    return std::make_unique<ExtractedStrategy>(core);
}

ExtractedStrategy::ExtractedStrategy(std::shared_ptr<SolverCore> core)
    : core_(std::move(core)), state_(PlayState::initial(core_->instance())) {}

NodeId ExtractedStrategy::respond(const Move& spoiler) {
    const GameInstance& g = core_->instance();
    for (NodeId reply : g.board(other(spoiler.board)).vertices()) {
        PlayState next = play_round(g, state_, spoiler, reply);
        if (!check_winning_last(g, next.history).satisfied) continue;
        if (core_->duplicator_wins(next)) {
            state_ = std::move(next);
            return reply;
        }
    }
    throw StrategyViolatedError("extracted strategy found no winning reply; "
                                "the position was not a Duplicator win");
}

} // namespace efg
