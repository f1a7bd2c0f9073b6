#include "efg/game.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace efg {

std::vector<NodeId> BoardView::vertices() const {
    std::vector<NodeId> out;
    out.reserve(static_cast<size_t>(size()));
    std::vector<NodeId> todo{root};
    while (!todo.empty()) {
        NodeId v = todo.back();
        todo.pop_back();
        out.push_back(v);
        for (NodeId c : tree->children(v)) todo.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Variants.

void validate_variant(const GameVariant& v) {
    if (const auto* sb = std::get_if<SwitchBudget>(&v)) {
        if (sb->switches < 0 || sb->rounds < sb->switches)
            throw ParameterError("switch-budget game needs rounds >= switches >= 0");
    } else if (const auto* fb = std::get_if<FixedBatches>(&v)) {
        if (fb->batches < 1 || fb->k < 1)
            throw ParameterError("fixed-batch game needs batches >= 1 and k >= 1");
    } else {
        const auto& sizes = std::get<BatchSizes>(v).sizes;
        if (sizes.empty()) throw ParameterError("batch-sizes game needs at least one segment");
        for (int s : sizes)
            if (s < 1) throw ParameterError("batch-sizes segments must be positive");
    }
}

int total_rounds(const GameVariant& v) {
    if (const auto* sb = std::get_if<SwitchBudget>(&v)) return sb->rounds;
    if (const auto* fb = std::get_if<FixedBatches>(&v)) return fb->batches * fb->k;
    const auto& sizes = std::get<BatchSizes>(v).sizes;
    return std::accumulate(sizes.begin(), sizes.end(), 0);
}

std::string variant_to_string(const GameVariant& v) {
    std::ostringstream out;
    if (const auto* sb = std::get_if<SwitchBudget>(&v)) {
        out << "switch:" << sb->switches << "," << sb->rounds;
    } else if (const auto* fb = std::get_if<FixedBatches>(&v)) {
        out << "batch:" << fb->batches << "," << fb->k;
    } else {
        out << "sizes:";
        const auto& sizes = std::get<BatchSizes>(v).sizes;
        for (size_t i = 0; i < sizes.size(); ++i) out << (i ? "," : "") << sizes[i];
    }
    return out.str();
}

GameVariant variant_from_string(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("variant must look like switch:s,r | batch:s,k | sizes:i1,i2,...");
    std::string kind = text.substr(0, colon);
    std::vector<int> nums;
    std::string rest = text.substr(colon + 1);
    std::istringstream in(rest);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            size_t used = 0;
            nums.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError("bad number '" + item + "' in variant '" + text + "'");
        }
    }
    GameVariant v;
    if (kind == "switch") {
        if (nums.size() != 2) throw ParseError("switch variant needs two numbers");
        v = SwitchBudget{nums[0], nums[1]};
    } else if (kind == "batch") {
        if (nums.size() != 2) throw ParseError("batch variant needs two numbers");
        v = FixedBatches{nums[0], nums[1]};
    } else if (kind == "sizes") {
        v = BatchSizes{nums};
    } else {
        throw ParseError("unknown variant kind '" + kind + "'");
    }
    validate_variant(v);
    return v;
}

// ---------------------------------------------------------------------------
// Instances and state.

void GameInstance::validate() const {
    if (!left.tree || !right.tree) throw ParameterError("instance needs two boards");
    if (!left.tree->valid_id(left.root) || !right.tree->valid_id(right.root))
        throw ParameterError("board root is not a valid vertex");
    validate_variant(variant);
    for (const auto& [x, y] : designated) {
        if (!left.contains(x)) throw ParameterError("designated pair references vertex outside left board");
        if (!right.contains(y)) throw ParameterError("designated pair references vertex outside right board");
    }
}

std::vector<std::pair<NodeId, NodeId>> GameInstance::initial_history() const {
    std::vector<std::pair<NodeId, NodeId>> h;
    h.reserve(1 + designated.size());
    h.emplace_back(left.root, right.root);
    for (const auto& p : designated) h.push_back(p);
    return h;
}

PlayState PlayState::initial(const GameInstance& g) {
    PlayState s;
    s.history = g.initial_history();
    return s;
}

// ---------------------------------------------------------------------------
// Winning conditions.

namespace {

// Checks Main 1 / Main 2 for the ordered pair (i, j).
bool pair_clean(const GameInstance& g, const std::pair<NodeId, NodeId>& a,
                const std::pair<NodeId, NodeId>& b, std::string* which) {
    const auto& [xi, yi] = a;
    const auto& [xj, yj] = b;
    auto px = g.left.parent_in_view(xj);
    auto py = g.right.parent_in_view(yj);
    const bool left_parent = px.has_value() && *px == xi;
    const bool right_parent = py.has_value() && *py == yi;
    if (left_parent != right_parent) {
        if (which) *which = "Main1";
        return false;
    }
    if ((xi == xj) != (yi == yj)) {
        if (which) *which = "Main2";
        return false;
    }
    return true;
}

} // namespace

WinCheck check_winning(const GameInstance& g, std::span<const std::pair<NodeId, NodeId>> history) {
    for (size_t j = 0; j < history.size(); ++j) {
        for (size_t i = 0; i < history.size(); ++i) {
            if (i == j) continue;
            std::string which;
            if (!pair_clean(g, history[i], history[j], &which))
                return WinCheck{false, static_cast<int>(i), static_cast<int>(j), which};
        }
    }
    return WinCheck{};
}

WinCheck check_winning_last(const GameInstance& g,
                            std::span<const std::pair<NodeId, NodeId>> history) {
    if (history.empty()) return WinCheck{};
    const size_t j = history.size() - 1;
    for (size_t i = 0; i < j; ++i) {
        std::string which;
        if (!pair_clean(g, history[i], history[j], &which))
            return WinCheck{false, static_cast<int>(i), static_cast<int>(j), which};
        if (!pair_clean(g, history[j], history[i], &which))
            return WinCheck{false, static_cast<int>(j), static_cast<int>(i), which};
    }
    return WinCheck{};
}

// ---------------------------------------------------------------------------
// Legality.

namespace {

// Board of the segment containing 1-based round `round` in a batch schedule
// with segment lengths `sizes`, given the board of the first segment.
Board scheduled_board(const std::vector<int>& sizes, Board first, int round) {
    int upto = 0;
    size_t seg = 0;
    for (; seg < sizes.size(); ++seg) {
        upto += sizes[seg];
        if (round <= upto) break;
    }
    return seg % 2 == 0 ? first : other(first);
}

std::vector<int> batch_sizes_of(const GameVariant& v) {
    if (const auto* fb = std::get_if<FixedBatches>(&v))
        return std::vector<int>(static_cast<size_t>(fb->batches), fb->k);
    return std::get<BatchSizes>(v).sizes;
}

} // namespace

std::optional<Board> forced_board(const GameInstance& g, const PlayState& s) {
    if (!s.spoiler_board) return std::nullopt; // round 1: free choice in every variant
    if (const auto* sb = std::get_if<SwitchBudget>(&g.variant)) {
        if (s.switches_used < sb->switches) return std::nullopt;
        return *s.spoiler_board;
    }
    // batch schedules: the board of every round is determined by the opening
    // board; recover the opening from the board of the last played round
    auto sizes = batch_sizes_of(g.variant);
    Board last_if_left_open = scheduled_board(sizes, Board::Left, s.round_index);
    Board opening =
        last_if_left_open == Board::Left ? *s.spoiler_board : other(*s.spoiler_board);
    return scheduled_board(sizes, opening, s.round_index + 1);
}

bool is_legal_spoiler_move(const GameInstance& g, const PlayState& s, const Move& m,
                           std::string* why) {
    if (s.game_over(g)) {
        if (why) *why = "the game is over";
        return false;
    }
    if (!g.board(m.board).contains(m.vertex)) {
        if (why) *why = "vertex is not on the chosen board";
        return false;
    }
    auto forced = forced_board(g, s);
    if (forced && m.board != *forced) {
        if (std::holds_alternative<SwitchBudget>(g.variant)) {
            if (why) *why = "no switches remain";
        } else {
            if (why) *why = "the batch schedule forces the other board";
        }
        return false;
    }
    return true;
}

std::vector<Move> legal_spoiler_moves(const GameInstance& g, const PlayState& s) {
    if (s.game_over(g)) throw GameOverError("no moves: the game is over");
    std::vector<Move> out;
    auto add_board = [&](Board b) {
        for (NodeId v : g.board(b).vertices()) out.push_back(Move{b, v});
    };
    auto forced = forced_board(g, s);
    if (forced) {
        add_board(*forced);
    } else {
        add_board(Board::Left);
        add_board(Board::Right);
    }
    return out;
}

PlayState play_round(const GameInstance& g, const PlayState& s, const Move& spoiler,
                     NodeId duplicator_vertex) {
    if (s.game_over(g)) throw GameOverError("play_round: the game is over");
    std::string why;
    if (!is_legal_spoiler_move(g, s, spoiler, &why))
        throw IllegalMoveError("illegal Spoiler move: " + why);
    const Board dup_board = other(spoiler.board);
    if (!g.board(dup_board).contains(duplicator_vertex))
        throw IllegalMoveError("illegal Duplicator move: vertex must be on the other board");

    PlayState next = s;
    if (s.spoiler_board && *s.spoiler_board != spoiler.board) ++next.switches_used;
    next.spoiler_board = spoiler.board;
    ++next.round_index;
    NodeId x = spoiler.board == Board::Left ? spoiler.vertex : duplicator_vertex;
    NodeId y = spoiler.board == Board::Left ? duplicator_vertex : spoiler.vertex;
    next.history.emplace_back(x, y);
    return next;
}

// ---------------------------------------------------------------------------
// Transcripts.

std::string write_transcript(const Transcript& t) {
    std::ostringstream out;
    out << "variant=" << variant_to_string(t.variant) << "\n";
    out << "designated=";
    for (size_t i = 0; i < t.designated.size(); ++i)
        out << (i ? "," : "") << t.designated[i].first << ":" << t.designated[i].second;
    out << "\n";
    for (size_t r = 0; r < t.rounds.size(); ++r) {
        const auto& [mv, dup] = t.rounds[r];
        out << "round=" << (r + 1) << " spoiler=" << board_letter(mv.board) << ":" << mv.vertex
            << " duplicator=" << board_letter(other(mv.board)) << ":" << dup << "\n";
    }
    if (t.result) out << "result=" << *t.result << "\n";
    return out.str();
}

namespace {

std::pair<Board, NodeId> parse_board_vertex(const std::string& text) {
    if (text.size() < 3 || (text[0] != 'L' && text[0] != 'R') || text[1] != ':')
        throw ParseError("expected L:<id> or R:<id>, got '" + text + "'");
    Board b = text[0] == 'L' ? Board::Left : Board::Right;
    return {b, std::stoi(text.substr(2))};
}

} // namespace

Transcript parse_transcript(const std::string& text) {
    Transcript t;
    bool saw_variant = false;
    std::istringstream in(text);
    std::string line;
    int expected_round = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("variant=", 0) == 0) {
            t.variant = variant_from_string(line.substr(8));
            saw_variant = true;
        } else if (line.rfind("designated=", 0) == 0) {
            std::string rest = line.substr(11);
            std::istringstream pairs(rest);
            std::string item;
            while (std::getline(pairs, item, ',')) {
                auto colon = item.find(':');
                if (colon == std::string::npos)
                    throw ParseError("designated pair must look like x:y");
                t.designated.emplace_back(std::stoi(item.substr(0, colon)),
                                          std::stoi(item.substr(colon + 1)));
            }
        } else if (line.rfind("round=", 0) == 0) {
            std::istringstream fields(line);
            std::string f1, f2, f3;
            fields >> f1 >> f2 >> f3;
            if (f2.rfind("spoiler=", 0) != 0 || f3.rfind("duplicator=", 0) != 0)
                throw ParseError("malformed round line: '" + line + "'");
            int round = std::stoi(f1.substr(6));
            if (round != expected_round++)
                throw ParseError("round numbers must be consecutive from 1");
            auto [sb, sv] = parse_board_vertex(f2.substr(8));
            auto [db, dv] = parse_board_vertex(f3.substr(11));
            if (db != other(sb))
                throw ParseError("duplicator must answer on the other board");
            t.rounds.emplace_back(Move{sb, sv}, dv);
        } else if (line.rfind("result=", 0) == 0) {
            t.result = line.substr(7);
        } else {
            throw ParseError("unrecognized transcript line: '" + line + "'");
        }
    }
    if (!saw_variant) throw ParseError("transcript is missing the variant header");
    return t;
}

WinCheck replay_transcript(const GameInstance& g, const Transcript& t) {
    GameInstance inst = g;
    inst.variant = t.variant;
    inst.designated = t.designated;
    inst.validate();
    PlayState s = PlayState::initial(inst);
    for (const auto& [mv, dup] : t.rounds) s = play_round(inst, s, mv, dup);
    return check_winning(inst, s.history);
}

} // namespace efg
