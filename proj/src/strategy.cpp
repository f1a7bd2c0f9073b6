#include "efg/strategy.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "json.hpp"

#include "efg/adaptors.hpp"

namespace efg {

// ---------------------------------------------------------------------------
// Caches.

const CanonicalTable& PhiCache::codes(const Tree& t) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = codes_[&t];
    if (!slot) slot = std::make_unique<CanonicalTable>(t);
    return *slot;
}

const IsoMap& PhiCache::get(const Tree& src, NodeId src_root, const Tree& dst, NodeId dst_root) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(&src, src_root, &dst, dst_root);
    auto& slot = maps_[key];
    if (!slot) {
        auto& src_codes = codes_[&src];
        if (!src_codes) src_codes = std::make_unique<CanonicalTable>(src);
        auto& dst_codes = codes_[&dst];
        if (!dst_codes) dst_codes = std::make_unique<CanonicalTable>(dst);
        slot = std::make_unique<IsoMap>(
            construction_isomorphism(src, src_root, dst, dst_root, src_codes.get(), dst_codes.get()));
    }
    return *slot;
}

std::shared_ptr<SolverCore> FallbackCache::winning_core(const GameInstance& g, Board spoiler_start) {
    std::ostringstream key;
    key << g.left.tree << ':' << g.left.root << '|' << g.right.tree << ':' << g.right.root << '|'
        << variant_to_string(g.variant) << '|' << board_letter(spoiler_start) << '|';
    for (const auto& [x, y] : g.designated) key << x << ',' << y << ';';

    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = cores_[key.str()];
    if (!slot) {
        SolveOptions opts;
        opts.forced_start_board = spoiler_start;
        slot = std::make_shared<SolverCore>(g, SolveLimits{}, opts);
        if (!slot->duplicator_wins(PlayState::initial(g)))
            throw StrategyViolatedError(
                "solver fallback: Spoiler wins a position the strategy relies on");
    }
    return slot;
}

// ---------------------------------------------------------------------------
// Structure helpers.

NodeId distinguished_child(const Tree& tree, const CanonicalTable& codes, NodeId root) {
    const auto& ch = tree.children(root);
    if (ch.size() < 2)
        throw ParameterError("node has too few children to carry a distinguished one");
    std::map<std::string, std::pair<int, NodeId>> counts; // code -> (count, lowest child)
    for (NodeId c : ch) {
        auto& slot = counts[codes.code(c)];
        if (slot.first == 0) slot.second = c;
        ++slot.first;
    }
    if (counts.size() == 2) {
        // the odd one out among otherwise identical siblings
        auto it = counts.begin();
        auto jt = std::next(it);
        if (it->second.first == 1 && jt->second.first > 1) return it->second.second;
        if (jt->second.first == 1 && it->second.first > 1) return jt->second.second;
        if (ch.size() == 2) {
            // two singleton codes: the bottom shape, distinguished child is childless
            for (NodeId c : ch)
                if (tree.children(c).empty()) return c;
        }
    }
    throw ParameterError("board is not shaped like the family's second tree");
}

Validation validate_designated(const BoardView& left, const BoardView& right, int k,
                               const DesignatedConfig& cfg, PhiCache& phi) {
    if (static_cast<int>(cfg.pairs.size()) > k)
        return {false, "ell<=k", "more designated pairs than the batch length"};
    if (cfg.pairs.empty()) return {};
    const Tree& lt = *left.tree;
    const Tree& rt = *right.tree;
    const NodeId dist = distinguished_child(rt, phi.codes(rt), right.root);

    struct Loc {
        NodeId t, d;
    };
    std::vector<Loc> locs;
    for (const auto& [x, y] : cfg.pairs) {
        if (!left.contains(x) || x == left.root)
            return {false, "C1", "left vertex is not inside a top-level subtree"};
        if (!right.contains(y) || y == right.root)
            return {false, "C1", "right vertex is not inside a top-level subtree"};
        NodeId t = lt.child_towards(left.root, x);
        NodeId d = rt.child_towards(right.root, y);
        if (d == dist)
            return {false, "C1", "right vertex lies under the distinguished child"};
        locs.push_back({t, d});
    }
    for (size_t i = 0; i < locs.size(); ++i)
        for (size_t j = 0; j < locs.size(); ++j) {
            if ((locs[i].t == locs[j].t) != (locs[i].d == locs[j].d))
                return {false, "C2", "co-location of pairs differs between the two boards"};
        }
    for (size_t i = 0; i < cfg.pairs.size(); ++i) {
        const auto& iso = phi.get(lt, locs[i].t, rt, locs[i].d);
        if (iso.apply(cfg.pairs[i].first) != cfg.pairs[i].second)
            return {false, "C3", "pair is not matched by the fixed subtree isomorphism"};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Session.

namespace {

/// Child strategy wrapper so a recursive session can sit behind the
/// DuplicatorStrategy interface of the virtual-batch driver.
class SessionStrategy final : public DuplicatorStrategy {
public:
    explicit SessionStrategy(StrategySession session) : session_(std::move(session)) {}
    SessionStrategy(const SessionStrategy&) = default;

    std::unique_ptr<DuplicatorStrategy> clone() const override {
        return std::make_unique<SessionStrategy>(*this);
    }
    NodeId respond(const Move& spoiler) override { return session_.respond(spoiler); }
    std::string name() const override { return "paper-session"; }
    const StrategySession& session() const { return session_; }

private:
    StrategySession session_;
};

} // namespace

struct StrategySession::ChildGame {
    GameInstance instance;
    Board start = Board::Left;
    std::unique_ptr<VirtualBatchDriver> driver;

    ChildGame() = default;
    ChildGame(const ChildGame& o)
        : instance(o.instance), start(o.start),
          driver(o.driver ? std::make_unique<VirtualBatchDriver>(*o.driver) : nullptr) {}
};

StrategySession::StrategySession(std::shared_ptr<const Context> ctx, BoardView left,
                                 BoardView right, int s, DesignatedConfig designated,
                                 Board spoiler_start)
    : ctx_(std::move(ctx)), left_(left), right_(right), s_(s),
      ell_(static_cast<int>(designated.pairs.size())), start_(spoiler_start) {
    if (s_ < 1) throw ParameterError("session level must be >= 1");
    if (ell_ > ctx_->k)
        throw ParameterError("more designated pairs than the batch length");
    if (start_ == Board::Left && ell_ > 0)
        throw ParameterError("left-start sessions take no designated pairs");
    if (s_ == 1 && ell_ > 0)
        throw ParameterError("level-1 sessions with designated pairs are solver territory");

    history_.reserve(static_cast<size_t>(1 + ell_ + s_ * ctx_->k));
    history_.emplace_back(left_.root, right_.root);
    for (const auto& p : designated.pairs) history_.push_back(p);

    if (s_ >= 2) {
        role_right_ = distinguished_child(*right_.tree, ctx_->phi->codes(*right_.tree), right_.root);
        if (start_ == Board::Right) {
            auto v = validate_designated(left_, right_, ctx_->k, designated, *ctx_->phi);
            if (!v.valid)
                throw ParameterError("designated pairs rejected at " + v.condition + ": " + v.reason);
            // the role child stands in for the construction's last top-level
            // child; any untouched one works, lowest id keeps it deterministic
            for (NodeId c : left_.tree->children(left_.root)) {
                if (!left_subtree_touched(c)) {
                    role_left_ = c;
                    break;
                }
            }
            if (!role_left_)
                throw ParameterError("designated pairs leave no free top-level child");
        }
    }
}

StrategySession::StrategySession(const StrategySession& o)
    : ctx_(o.ctx_), left_(o.left_), right_(o.right_), s_(o.s_), ell_(o.ell_), start_(o.start_),
      history_(o.history_), rounds_(o.rounds_), role_left_(o.role_left_),
      role_right_(o.role_right_), child_(o.child_ ? std::make_unique<ChildGame>(*o.child_) : nullptr) {}

StrategySession::StrategySession(StrategySession&&) noexcept = default;
StrategySession::~StrategySession() = default;

Board StrategySession::expected_board(int round) const {
    const int batch = batch_of_round(round);
    return batch % 2 == 1 ? start_ : other(start_);
}

std::optional<size_t> StrategySession::find_left(NodeId x) const {
    for (size_t i = 0; i < history_.size(); ++i)
        if (history_[i].first == x) return i;
    return std::nullopt;
}

std::optional<size_t> StrategySession::find_right(NodeId y) const {
    for (size_t i = 0; i < history_.size(); ++i)
        if (history_[i].second == y) return i;
    return std::nullopt;
}

bool StrategySession::left_subtree_touched(NodeId top) const {
    for (const auto& [x, y] : history_)
        if (x != left_.root && left_.tree->in_subtree(top, x)) return true;
    return false;
}

bool StrategySession::right_subtree_touched(NodeId top) const {
    for (const auto& [x, y] : history_)
        if (y != right_.root && right_.tree->in_subtree(top, y)) return true;
    return false;
}

std::optional<size_t> StrategySession::pair_with_left_in(NodeId top) const {
    for (size_t i = 1; i < history_.size(); ++i)
        if (history_[i].first != left_.root && left_.tree->in_subtree(top, history_[i].first))
            return i;
    return std::nullopt;
}

std::optional<size_t> StrategySession::pair_with_right_in(NodeId top) const {
    for (size_t i = 1; i < history_.size(); ++i)
        if (history_[i].second != right_.root && right_.tree->in_subtree(top, history_[i].second))
            return i;
    return std::nullopt;
}

const IsoMap& StrategySession::phi_top(NodeId left_top, NodeId right_top) const {
    return ctx_->phi->get(*left_.tree, left_top, *right_.tree, right_top);
}

NodeId StrategySession::respond(const Move& spoiler) {
    const int round = rounds_ + 1;
    if (round > s_ * ctx_->k) throw StrategyViolatedError("move past the final round");
    if (spoiler.board != expected_board(round))
        throw StrategyViolatedError("move fed on the wrong board for this batch");
    const BoardView& board = spoiler.board == Board::Left ? left_ : right_;
    if (!board.contains(spoiler.vertex))
        throw StrategyViolatedError("spoiler vertex is outside its board");

    NodeId reply;
    if (s_ == 1) {
        reply = respond_base(spoiler);
    } else {
        const int batch = batch_of_round(round);
        reply = batch == 1 ? respond_first_batch(spoiler) : respond_second_part(spoiler, batch);
    }

    ++rounds_;
    if (spoiler.board == Board::Left)
        history_.emplace_back(spoiler.vertex, reply);
    else
        history_.emplace_back(reply, spoiler.vertex);
    return reply;
}

// Level 1: one batch, played whole on the opening board.
NodeId StrategySession::respond_base(const Move& spoiler) {
    const Tree& lt = *left_.tree;
    const Tree& rt = *right_.tree;
    if (spoiler.board == Board::Right) {
        const NodeId y = spoiler.vertex;
        if (auto i = find_right(y)) return history_[*i].first; // repeats keep their mates
        if (y == right_.root) return left_.root;
        const auto& rtops = rt.children(right_.root);
        const auto& ltops = lt.children(left_.root);
        NodeId d = rt.child_towards(right_.root, y);
        size_t idx = static_cast<size_t>(std::find(rtops.begin(), rtops.end(), d) - rtops.begin());
        NodeId u = ltops[idx]; // same-index matching; both roots have m+1 children
        if (y == d) return u;
        if (rt.parent(y) == d) {
            for (NodeId c : lt.children(u))
                if (!find_left(c)) return c;
            throw StrategyViolatedError("no fresh child left on the first board");
        }
        throw StrategyViolatedError("vertex deeper than the level-1 shape allows");
    }

    // Spoiler on the left board.
    const NodeId x = spoiler.vertex;
    if (auto i = find_left(x)) return history_[*i].second;
    if (x == left_.root) return right_.root;
    NodeId t = lt.child_towards(left_.root, x);

    auto fresh_right_top = [&]() -> NodeId {
        for (NodeId d : rt.children(right_.root)) {
            if (rt.children(d).empty()) continue; // the childless child answers nothing
            if (!right_subtree_touched(d)) return d;
        }
        throw StrategyViolatedError("no free subtree left on the second board");
    };
    auto fresh_child_of = [&](NodeId d) -> NodeId {
        for (NodeId c : rt.children(d))
            if (!find_right(c)) return c;
        throw StrategyViolatedError("no fresh child left on the second board");
    };

    if (x == t) {
        if (auto i = pair_with_left_in(t)) {
            // some child of t was picked; its mate's parent is t's counterpart
            NodeId mate_parent = *rt.parent(history_[*i].second);
            return mate_parent;
        }
        return fresh_right_top();
    }
    if (lt.parent(x) == t) {
        if (auto i = find_left(t)) return fresh_child_of(history_[*i].second);
        if (auto i = pair_with_left_in(t)) {
            NodeId sibling_mate = history_[*i].second;
            return fresh_child_of(*rt.parent(sibling_mate));
        }
        return fresh_child_of(fresh_right_top());
    }
    throw StrategyViolatedError("vertex deeper than the level-1 shape allows");
}

NodeId StrategySession::respond_first_batch(const Move& spoiler) {
    const Tree& lt = *left_.tree;
    const Tree& rt = *right_.tree;

    if (start_ == Board::Right) {
        const NodeId y = spoiler.vertex;
        if (y == right_.root) return left_.root;
        NodeId d = rt.child_towards(right_.root, y);
        if (d != *role_right_) {
            NodeId t;
            if (auto i = pair_with_right_in(d)) {
                t = lt.child_towards(left_.root, history_[*i].first);
            } else {
                t = -1;
                for (NodeId c : lt.children(left_.root)) {
                    if (c == *role_left_ || left_subtree_touched(c)) continue;
                    t = c;
                    break;
                }
                if (t < 0) throw StrategyViolatedError("no free subtree left on the first board");
            }
            return phi_top(t, d).invert(y);
        }
        // inside the distinguished right subtree: answer inside the role subtree
        if (y == *role_right_) return *role_left_;
        NodeId e = rt.child_towards(*role_right_, y);
        NodeId f;
        if (auto i = pair_with_right_in(e)) {
            f = lt.child_towards(*role_left_, history_[*i].first);
        } else {
            NodeId skip = distinguished_child(lt, ctx_->phi->codes(lt), *role_left_);
            f = -1;
            for (NodeId c : lt.children(*role_left_)) {
                if (c == skip || left_subtree_touched(c)) continue;
                f = c;
                break;
            }
            if (f < 0) throw StrategyViolatedError("no free second-level subtree available");
        }
        return phi_top(f, e).invert(y);
    }

    // Left start: no role yet, all m+1 left subtrees behave alike.
    const NodeId x = spoiler.vertex;
    if (x == left_.root) return right_.root;
    NodeId t = lt.child_towards(left_.root, x);
    NodeId d;
    if (auto i = pair_with_left_in(t)) {
        d = rt.child_towards(right_.root, history_[*i].second);
    } else {
        d = -1;
        for (NodeId c : rt.children(right_.root)) {
            if (c == *role_right_ || right_subtree_touched(c)) continue;
            d = c;
            break;
        }
        if (d < 0) throw StrategyViolatedError("no free subtree left on the second board");
    }
    return phi_top(t, d).apply(x);
}

void StrategySession::ensure_role_assigned() {
    if (role_left_) return;
    for (NodeId c : left_.tree->children(left_.root)) {
        if (!left_subtree_touched(c)) {
            role_left_ = c;
            return;
        }
    }
    throw StrategyViolatedError("no free top-level child to take the role");
}

NodeId StrategySession::respond_second_part(const Move& spoiler, int batch) {
    ensure_role_assigned();
    const Tree& lt = *left_.tree;
    const Tree& rt = *right_.tree;

    if (spoiler.board == Board::Left) {
        const NodeId x = spoiler.vertex;
        if (x == left_.root) return right_.root;
        NodeId t = lt.child_towards(left_.root, x);
        if (t == *role_left_) return delegate_to_child(spoiler, batch);
        NodeId d;
        if (auto i = pair_with_left_in(t)) {
            d = rt.child_towards(right_.root, history_[*i].second);
            if (d == *role_right_)
                throw StrategyViolatedError("correspondence leaked into the role subtrees");
        } else {
            d = -1;
            for (NodeId c : rt.children(right_.root)) {
                if (c == *role_right_ || right_subtree_touched(c)) continue;
                d = c;
                break;
            }
            if (d < 0) throw StrategyViolatedError("no free subtree left on the second board");
        }
        return phi_top(t, d).apply(x);
    }

    const NodeId y = spoiler.vertex;
    if (y == right_.root) return left_.root;
    NodeId d = rt.child_towards(right_.root, y);
    if (d == *role_right_) return delegate_to_child(spoiler, batch);
    NodeId t;
    if (auto i = pair_with_right_in(d)) {
        t = lt.child_towards(left_.root, history_[*i].first);
        if (t == *role_left_)
            throw StrategyViolatedError("correspondence leaked into the role subtrees");
    } else {
        t = -1;
        for (NodeId c : lt.children(left_.root)) {
            if (c == *role_left_ || left_subtree_touched(c)) continue;
            t = c;
            break;
        }
        if (t < 0) throw StrategyViolatedError("no free subtree left on the first board");
    }
    return phi_top(t, d).invert(y);
}

NodeId StrategySession::delegate_to_child(const Move& spoiler, int batch) {
    if (!child_) {
        child_ = std::make_unique<ChildGame>();
        child_->instance.left = BoardView{right_.tree, *role_right_};
        child_->instance.right = BoardView{left_.tree, *role_left_};
        child_->instance.variant = FixedBatches{s_ - 1, ctx_->k};
        // picks already made inside the role subtrees become the child's
        // designated pairs, with the boards swapped; picks of the role pair
        // itself only duplicate the child's root pair and are dropped
        for (int r = 1; r <= std::min(rounds_, ctx_->k); ++r) {
            const auto& [x, y] = history_[static_cast<size_t>(ell_ + r)];
            const bool x_inside =
                x != *role_left_ && x != left_.root && left_.tree->in_subtree(*role_left_, x);
            const bool y_inside =
                y != *role_right_ && y != right_.root && right_.tree->in_subtree(*role_right_, y);
            if (x_inside != y_inside)
                throw StrategyViolatedError("role-subtree picks lost their pairing");
            if (x_inside) child_->instance.designated.emplace_back(y, x);
        }
        child_->start = start_ == Board::Right ? Board::Right : Board::Left;

        std::unique_ptr<DuplicatorStrategy> inner;
        if (s_ - 1 == 1 && !child_->instance.designated.empty()) {
            auto core = ctx_->fallback->winning_core(child_->instance, child_->start);
            inner = std::make_unique<ExtractedStrategy>(std::move(core));
        } else {
            DesignatedConfig cfg{child_->instance.designated};
            inner = std::make_unique<SessionStrategy>(
                StrategySession(ctx_, child_->instance.left, child_->instance.right, s_ - 1,
                                std::move(cfg), child_->start));
        }
        child_->driver =
            std::make_unique<VirtualBatchDriver>(child_->instance, std::move(inner), child_->start);
    }
    const Board child_board = spoiler.board == Board::Left ? Board::Right : Board::Left;
    return child_->driver->respond(batch - 1, Move{child_board, spoiler.vertex});
}

// ---------------------------------------------------------------------------
// Selfcheck: every applicable condition re-derived from the raw history.

namespace {

struct ConditionSink {
    SelfcheckReport& report;
    void add(const std::string& label, bool ok, const std::string& why = {}) {
        report.conditions.emplace_back(label, ok);
        if (!ok) {
            report.all_pass = false;
            if (report.detail.empty()) report.detail = label + (why.empty() ? "" : ": " + why);
        }
    }
};

} // namespace

void StrategySession::check_conditions(std::span<const std::pair<NodeId, NodeId>> hist,
                                       SelfcheckReport& report) const {
    ConditionSink sink{report};
    const Tree& lt = *left_.tree;
    const Tree& rt = *right_.tree;
    const size_t n = hist.size();
    const size_t picks_begin = static_cast<size_t>(1 + ell_);

    auto topL = [&](NodeId x) -> std::optional<NodeId> {
        if (x == left_.root) return std::nullopt;
        return lt.child_towards(left_.root, x);
    };
    auto topR = [&](NodeId y) -> std::optional<NodeId> {
        if (y == right_.root) return std::nullopt;
        return rt.child_towards(right_.root, y);
    };

    // Main conditions over the whole configuration.
    {
        bool main1 = true, main2 = true;
        for (size_t i = 0; i < n && (main1 || main2); ++i) {
            for (size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                auto px = hist[j].first == left_.root ? std::optional<NodeId>{}
                                                      : lt.parent(hist[j].first);
                auto py = hist[j].second == right_.root ? std::optional<NodeId>{}
                                                        : rt.parent(hist[j].second);
                bool lp = px && *px == hist[i].first;
                bool rp = py && *py == hist[i].second;
                if (lp != rp) main1 = false;
                if ((hist[i].first == hist[j].first) != (hist[i].second == hist[j].second))
                    main2 = false;
            }
        }
        sink.add("MAIN1", main1);
        sink.add("MAIN2", main2);
    }

    // Designated admission conditions.
    if (ell_ > 0) {
        DesignatedConfig cfg;
        for (size_t i = 1; i < picks_begin && i < n; ++i) cfg.pairs.push_back(hist[i]);
        auto v = validate_designated(left_, right_, ctx_->k, cfg, *ctx_->phi);
        sink.add("C1", v.valid || v.condition != "C1", v.reason);
        sink.add("C2", v.valid || v.condition != "C2", v.reason);
        sink.add("C3", v.valid || v.condition != "C3", v.reason);
    }

    if (s_ == 1) {
        check_base_conditions(hist, report);
        return;
    }

    const int k = ctx_->k;
    const size_t batch1_end = std::min(n, picks_begin + static_cast<size_t>(k));
    const bool right_start = start_ == Board::Right;
    const std::string pre = right_start ? "A" : "AL";

    // First-batch conditions over picks 1..min(p, k).
    {
        bool a1 = true, a2 = true, a3 = true;
        std::string why1, why2, why3;
        std::vector<size_t> nonrole_entries, role_entries;
        for (size_t i = 1; i < batch1_end; ++i) {
            NodeId x = hist[i].first, y = hist[i].second;
            if (i >= picks_begin) {
                if ((x == left_.root) != (y == right_.root)) {
                    a1 = false;
                    why1 = "root picks must pair with root picks";
                    continue;
                }
                if (x == left_.root) continue;
                NodeId t = *topL(x), d = *topR(y);
                const bool role_t = role_left_ && t == *role_left_;
                const bool role_d = role_right_ && d == *role_right_;
                if (right_start) {
                    if (role_t != role_d) {
                        a1 = false;
                        why1 = "role-subtree membership differs between boards";
                    } else if (!role_t) {
                        if (phi_top(t, d).apply(x) != y) {
                            a1 = false;
                            why1 = "pair is off its fixed top-level isomorphism";
                        }
                    } else {
                        if ((x == *role_left_) != (y == *role_right_)) {
                            a1 = false;
                            why1 = "role vertices must pair with each other";
                        } else if (x != *role_left_) {
                            NodeId skip = distinguished_child(lt, ctx_->phi->codes(lt), *role_left_);
                            NodeId f = lt.child_towards(*role_left_, x);
                            NodeId e = rt.child_towards(*role_right_, y);
                            if (f == skip) {
                                a1 = false;
                                why1 = "pick entered the distinguished second-level subtree";
                            } else if (phi_top(f, e).apply(x) != y) {
                                a1 = false;
                                why1 = "pair is off its fixed second-level isomorphism";
                            }
                        }
                    }
                } else {
                    if (role_d) {
                        a1 = false;
                        why1 = "answer entered the distinguished subtree";
                    } else if (phi_top(t, d).apply(x) != y) {
                        a1 = false;
                        why1 = "pair is off its fixed top-level isomorphism";
                    }
                }
            }
            // entry classification for the co-location conditions (includes designated)
            if (x == left_.root) continue;
            NodeId t = *topL(x);
            if (role_left_ && t == *role_left_) {
                if (x != *role_left_) role_entries.push_back(i);
            } else {
                nonrole_entries.push_back(i);
            }
        }
        for (size_t a : nonrole_entries)
            for (size_t b : nonrole_entries) {
                if ((*topL(hist[a].first) == *topL(hist[b].first)) !=
                    (*topR(hist[a].second) == *topR(hist[b].second))) {
                    a2 = false;
                    why2 = "top-level co-location differs between boards";
                }
            }
        for (size_t a : role_entries)
            for (size_t b : role_entries) {
                NodeId fa = lt.child_towards(*role_left_, hist[a].first);
                NodeId fb = lt.child_towards(*role_left_, hist[b].first);
                NodeId ea = rt.child_towards(*role_right_, hist[a].second);
                NodeId eb = rt.child_towards(*role_right_, hist[b].second);
                if ((fa == fb) != (ea == eb)) {
                    a3 = false;
                    why3 = "second-level co-location differs between boards";
                }
            }
        sink.add(pre + "1", a1, why1);
        sink.add(pre + "2", a2, why2);
        sink.add(pre + "3", a3, why3);
    }

    // Second-part conditions over the full configuration.
    if (n > batch1_end || rounds_ > k) {
        const std::string bpre = right_start ? "B" : "BL";
        bool b1 = true, b2 = true, b3 = true, b4 = true;
        std::string why2, why4;
        std::vector<size_t> nonrole_entries;
        for (size_t i = 0; i < n; ++i) {
            NodeId x = hist[i].first, y = hist[i].second;
            if ((x == left_.root) != (y == right_.root)) b1 = false;
            if (x == left_.root || y == right_.root) continue;
            NodeId t = *topL(x), d = *topR(y);
            const bool role_t = role_left_ && t == *role_left_;
            const bool role_d = role_right_ && d == *role_right_;
            if (role_t != role_d) {
                b4 = false;
                why4 = "role-subtree membership differs between boards";
                continue;
            }
            if (!role_t) {
                nonrole_entries.push_back(i);
                if (phi_top(t, d).apply(x) != y) {
                    b2 = false;
                    why2 = "pair is off its fixed top-level isomorphism";
                }
            }
        }
        for (size_t a : nonrole_entries)
            for (size_t b : nonrole_entries) {
                if ((*topL(hist[a].first) == *topL(hist[b].first)) !=
                    (*topR(hist[a].second) == *topR(hist[b].second)))
                    b3 = false;
            }
        // batch accounting: per real batch, the role-pair picks must fit the
        // child batch; the recursive session re-checks its own conditions
        for (int b = 2; b <= batch_of_round(std::max(rounds_, 1)); ++b) {
            int count = 0;
            for (int r = (b - 1) * k + 1; r <= std::min(rounds_, b * k); ++r) {
                size_t idx = picks_begin + static_cast<size_t>(r) - 1;
                if (idx >= n) break;
                NodeId x = hist[idx].first;
                if (role_left_ && x != left_.root && lt.in_subtree(*role_left_, x)) ++count;
            }
            if (count > k) b4 = false;
        }
        if (child_ && child_->driver) {
            if (const auto* paper = dynamic_cast<const SessionStrategy*>(child_->driver->inner())) {
                auto child_report = paper->session().selfcheck();
                if (!child_report.all_pass) {
                    b4 = false;
                    why4 = "child session: " + child_report.detail;
                }
            }
        }
        sink.add(bpre + "1", b1);
        sink.add(bpre + "2", b2, why2);
        sink.add(bpre + "3", b3);
        sink.add(bpre + "4", b4, why4);
    }
}

// Level-1 condition lists, one per opening board.
void StrategySession::check_base_conditions(std::span<const std::pair<NodeId, NodeId>> hist,
                                            SelfcheckReport& report) const {
    ConditionSink sink{report};
    const Tree& lt = *left_.tree;
    const Tree& rt = *right_.tree;
    const auto& ltops = lt.children(left_.root);
    const auto& rtops = rt.children(right_.root);

    auto left_top_index = [&](NodeId v) -> std::optional<size_t> {
        if (v == left_.root) return std::nullopt;
        NodeId t = lt.child_towards(left_.root, v);
        return static_cast<size_t>(std::find(ltops.begin(), ltops.end(), t) - ltops.begin());
    };
    auto right_top_index = [&](NodeId v) -> std::optional<size_t> {
        if (v == right_.root) return std::nullopt;
        NodeId t = rt.child_towards(right_.root, v);
        return static_cast<size_t>(std::find(rtops.begin(), rtops.end(), t) - rtops.begin());
    };

    if (start_ == Board::Right) {
        // same-index matching of top-level children and their children
        bool b1 = true, b2 = true;
        for (size_t i = 1; i < hist.size(); ++i) {
            NodeId x = hist[i].first, y = hist[i].second;
            if ((x == left_.root) != (y == right_.root)) b1 = false;
            if (y == right_.root || x == left_.root) continue;
            bool y_is_top = std::find(rtops.begin(), rtops.end(), y) != rtops.end();
            bool x_is_top = std::find(ltops.begin(), ltops.end(), x) != ltops.end();
            if (y_is_top != x_is_top) {
                b1 = false;
            } else if (y_is_top) {
                if (*right_top_index(y) != *left_top_index(x)) b1 = false;
            } else if (*right_top_index(y) != *left_top_index(x)) {
                b2 = false;
            }
        }
        sink.add("BASE1", b1, "top-level picks must pair by index");
        sink.add("BASE2", b2, "children must pair under same-index parents");
        return;
    }

    // Spoiler opened on the first board: the six maintained conditions.
    bool c1 = true, c2 = true, c3 = true, c4 = true, c5 = true, c6 = true;
    const size_t n = hist.size();
    for (size_t j = 1; j < n; ++j) {
        NodeId x = hist[j].first, y = hist[j].second;
        for (size_t j2 = 1; j2 < n; ++j2) {
            if (j == j2) continue;
            if ((x == hist[j2].first) != (y == hist[j2].second)) c1 = false;
            auto px = x == left_.root ? std::optional<NodeId>{} : lt.parent(x);
            auto py = y == right_.root ? std::optional<NodeId>{} : rt.parent(y);
            bool lp = px && *px == hist[j2].first;
            bool rp = py && *py == hist[j2].second;
            if (lp != rp) c4 = false;
            // siblings share a parent
            auto px2 = hist[j2].first == left_.root ? std::optional<NodeId>{}
                                                    : lt.parent(hist[j2].first);
            auto py2 = hist[j2].second == right_.root ? std::optional<NodeId>{}
                                                      : rt.parent(hist[j2].second);
            bool lsib = px && px2 && *px == *px2;
            bool rsib = py && py2 && *py == *py2;
            if (lsib != rsib) c6 = false;
        }
        bool x_is_top = std::find(ltops.begin(), ltops.end(), x) != ltops.end();
        bool y_is_fertile_top = std::find(rtops.begin(), rtops.end(), y) != rtops.end() &&
                                !rt.children(y).empty();
        if (x_is_top != y_is_fertile_top) c2 = false;
        bool x_is_grand = !x_is_top && x != left_.root && lt.parent(x) &&
                          std::find(ltops.begin(), ltops.end(), *lt.parent(x)) != ltops.end();
        bool y_is_grand = y != right_.root && !y_is_fertile_top &&
                          std::find(rtops.begin(), rtops.end(), y) == rtops.end() && rt.parent(y) &&
                          std::find(rtops.begin(), rtops.end(), *rt.parent(y)) != rtops.end();
        if (x_is_grand != y_is_grand) c3 = false;
        if (x_is_top && y_is_fertile_top) {
            // freshness must match: free tops answer free tops
            bool x_free = true, y_free = true;
            for (size_t i = 1; i < j; ++i) {
                if (hist[i].first != left_.root && lt.in_subtree(x, hist[i].first)) x_free = false;
                if (hist[i].second != right_.root && rt.in_subtree(y, hist[i].second))
                    y_free = false;
            }
            if (x_free != y_free) c5 = false;
        }
    }
    sink.add("BASE1", c1, "repeats must pair with repeats");
    sink.add("BASE2", c2, "top-level picks must pair with fertile top-level picks");
    sink.add("BASE3", c3, "second-level picks must pair with second-level picks");
    sink.add("BASE4", c4, "parent links must match");
    sink.add("BASE5", c5, "free top-level picks must pair with free ones");
    sink.add("BASE6", c6, "siblings must pair with siblings");
}

SelfcheckReport StrategySession::selfcheck(
    std::optional<std::span<const std::pair<NodeId, NodeId>>> history_override) const {
    SelfcheckReport report;
    std::span<const std::pair<NodeId, NodeId>> hist =
        history_override ? *history_override
                         : std::span<const std::pair<NodeId, NodeId>>(history_);
    check_conditions(hist, report);
    return report;
}

std::string StrategySession::dump_state_json() const {
    nlohmann::json j;
    j["level"] = s_;
    j["start_board"] = std::string(1, board_letter(start_));
    j["rounds_played"] = rounds_;
    j["designated_pairs"] = ell_;
    j["left_root"] = left_.root;
    j["right_root"] = right_.root;
    if (role_left_) j["role_left"] = *role_left_;
    if (role_right_) j["role_right"] = *role_right_;
    auto hist = nlohmann::json::array();
    for (const auto& [x, y] : history_) hist.push_back({x, y});
    j["history"] = std::move(hist);
    if (child_ && child_->driver) {
        if (const auto* paper = dynamic_cast<const SessionStrategy*>(child_->driver->inner()))
            j["child"] = nlohmann::json::parse(paper->session().dump_state_json());
        else
            j["child"] = "solver-backed";
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Public wrapper.

std::unique_ptr<PaperStrategy> PaperStrategy::make(const GameInstance& g, std::optional<int> s_opt,
                                                   std::optional<int> m_opt,
                                                   std::optional<Board> start_hint) {
    const auto* fb = std::get_if<FixedBatches>(&g.variant);
    if (!fb) throw ParameterError("the recursive strategy plays fixed-batch games");
    g.validate();

    auto param_from_blueprint = [&](const BoardView& view, auto pick) -> std::optional<int> {
        if (view.root != view.tree->root()) return std::nullopt;
        if (!view.tree->blueprint()) return std::nullopt;
        return pick(*view.tree->blueprint());
    };
    std::optional<int> s =
        s_opt ? s_opt : param_from_blueprint(g.left, [](const Blueprint& b) { return b.s; });
    std::optional<int> m =
        m_opt ? m_opt : param_from_blueprint(g.left, [](const Blueprint& b) { return b.m; });
    if (!s || !m)
        throw ParameterError("level and m must be given when the boards carry no blueprint");
    if (fb->batches != *s)
        throw ParameterError("batch count must equal the construction level");
    if (*m < *s * fb->k) throw ParameterError("parameters violate m >= s*k");

    // the strategy's case analysis assumes the exact family shapes
    Tree ref1 = build_construction(Role::T1, *s, fb->k, *m);
    Tree ref2 = build_construction(Role::T2, *s, fb->k, *m);
    if (canonical_code(*g.left.tree, g.left.root) != canonical_code(ref1, ref1.root()))
        throw ParameterError("left board is not the first family tree at these parameters");
    if (canonical_code(*g.right.tree, g.right.root) != canonical_code(ref2, ref2.root()))
        throw ParameterError("right board is not the second family tree at these parameters");

    auto ctx = std::make_shared<StrategySession::Context>();
    ctx->left_tree = g.left.tree;
    ctx->right_tree = g.right.tree;
    ctx->k = fb->k;
    ctx->m = *m;
    ctx->phi = std::make_shared<PhiCache>();
    ctx->fallback = std::make_shared<FallbackCache>();

    auto ps = std::unique_ptr<PaperStrategy>(new PaperStrategy());
    ps->ctx_ = ctx;
    ps->game_ = g;
    ps->s_ = *s;
    ps->start_ = start_hint;

    if (!g.designated.empty()) {
        auto v = validate_designated(g.left, g.right, fb->k, DesignatedConfig{g.designated},
                                     *ctx->phi);
        if (!v.valid)
            throw ParameterError("designated pairs rejected at " + v.condition + ": " + v.reason);
        if (start_hint && *start_hint == Board::Left)
            throw ParameterError("designated pairs require a right-start game");
        ps->start_ = Board::Right;
        if (*s == 1) {
            auto core = ctx->fallback->winning_core(g, Board::Right);
            ps->fallback_ = std::make_unique<ExtractedStrategy>(std::move(core));
        }
    }
    return ps;
}

PaperStrategy::PaperStrategy(const PaperStrategy& o)
    : ctx_(o.ctx_), game_(o.game_), s_(o.s_), start_(o.start_),
      session_(o.session_ ? std::make_unique<StrategySession>(*o.session_) : nullptr),
      fallback_(o.fallback_ ? o.fallback_->clone() : nullptr) {}

void PaperStrategy::ensure_session(Board first_board) {
    if (session_) return;
    if (start_ && *start_ != first_board)
        throw StrategyViolatedError("game opened on an unexpected board");
    start_ = first_board;
    session_ = std::make_unique<StrategySession>(ctx_, game_.left, game_.right, s_,
                                                 DesignatedConfig{game_.designated}, *start_);
}

NodeId PaperStrategy::respond(const Move& spoiler) {
    if (fallback_) return fallback_->respond(spoiler);
    if (!session_) ensure_session(spoiler.board);
    return session_->respond(spoiler);
}

SelfcheckReport PaperStrategy::selfcheck() const {
    if (session_) return session_->selfcheck();
    return SelfcheckReport{}; // solver-backed games re-check nothing here
}

} // namespace efg
