#include "efg/sweep.hpp"

#include <chrono>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "efg/solver.hpp"
#include "efg/strategy.hpp"

namespace efg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string summarize(const GameInstance& g) {
    return variant_to_string(g.variant) + " on |L|=" + std::to_string(g.left.size()) +
           " |R|=" + std::to_string(g.right.size()) + " designated=" +
           std::to_string(g.designated.size());
}

struct Counters {
    std::uint64_t lines = 0;
    std::uint64_t losses = 0;
    std::map<std::string, std::uint64_t> selfcheck_pass;
    std::map<std::string, std::uint64_t> selfcheck_fail;
    std::vector<std::pair<Move, NodeId>> first_loss;

    void merge(Counters&& o) {
        lines += o.lines;
        losses += o.losses;
        for (auto& [k, v] : o.selfcheck_pass) selfcheck_pass[k] += v;
        for (auto& [k, v] : o.selfcheck_fail) selfcheck_fail[k] += v;
        if (first_loss.empty() && !o.first_loss.empty()) first_loss = std::move(o.first_loss);
    }
};

void tally_selfcheck(const DuplicatorStrategy& strat, Counters& c) {
    const auto* paper = dynamic_cast<const PaperStrategy*>(&strat);
    if (!paper) return;
    auto report = paper->selfcheck();
    for (const auto& [label, ok] : report.conditions)
        ++(ok ? c.selfcheck_pass : c.selfcheck_fail)[label];
}

// Canonical tables are only materialized when the optional move dedup asks
// for them.
struct DedupTables {
    std::optional<CanonicalTable> left, right;
    void ensure(const GameInstance& g) {
        if (!left) left.emplace(*g.left.tree);
        if (!right) right.emplace(*g.right.tree);
    }
};

// One full round against the strategy. Returns false when the line is over
// (violation, forfeit, or final round), recording losses as they happen.
struct LineWalker {
    const GameInstance& g;
    const SweepOptions& opts;
    Counters& counters;
    const DedupTables* tables = nullptr;
    std::vector<std::pair<Move, NodeId>> path;

    void record_loss() {
        ++counters.lines;
        ++counters.losses;
        if (counters.first_loss.empty()) counters.first_loss = path;
    }

    std::vector<Move> options_at(const PlayState& state) const {
        std::vector<Move> moves = legal_spoiler_moves(g, state);
        if (state.round_index == 0 && opts.forced_start_board)
            std::erase_if(moves,
                          [&](const Move& m) { return m.board != *opts.forced_start_board; });
        if (opts.symmetry_dedup && tables)
            moves = dedup_spoiler_moves(g, state, std::move(moves), *tables->left, *tables->right);
        return moves;
    }

    void dfs(const PlayState& state, const DuplicatorStrategy& strat) {
        if (state.game_over(g)) {
            ++counters.lines;
            return;
        }
        for (const Move& move : options_at(state)) {
            auto branch = strat.clone();
            NodeId reply = 0;
            path.emplace_back(move, -1);
            try {
                reply = branch->respond(move);
                path.back().second = reply;
                PlayState next = play_round(g, state, move, reply);
                if (!check_winning_last(g, next.history).satisfied) {
                    record_loss();
                } else {
                    if (opts.selfcheck_each_round) tally_selfcheck(*branch, counters);
                    dfs(next, *branch);
                }
            } catch (const Error&) {
                // a strategy error forfeits the line
                record_loss();
            }
            path.pop_back();
        }
    }
};

std::vector<Move> opening_moves(const GameInstance& g, const SweepOptions& opts,
                                const DedupTables* tables) {
    PlayState start = PlayState::initial(g);
    std::vector<Move> moves = legal_spoiler_moves(g, start);
    if (opts.forced_start_board)
        std::erase_if(moves, [&](const Move& m) { return m.board != *opts.forced_start_board; });
    if (opts.symmetry_dedup && tables)
        moves = dedup_spoiler_moves(g, start, std::move(moves), *tables->left, *tables->right);
    return moves;
}

SweepReport make_report(const GameInstance& g, const DuplicatorStrategy& proto,
                        std::uint64_t estimate) {
    SweepReport r;
    r.instance_summary = summarize(g);
    r.strategy_name = proto.name();
    r.estimated_lines = estimate;
    return r;
}

} // namespace

std::uint64_t estimate_spoiler_lines(const GameInstance& g, std::optional<Board> forced_start) {
    const std::uint64_t nl = static_cast<std::uint64_t>(g.left.size());
    const std::uint64_t nr = static_cast<std::uint64_t>(g.right.size());
    const int rounds = total_rounds(g.variant);
    auto capped_mul = [](std::uint64_t a, std::uint64_t b) {
        if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
        return a * b;
    };
    if (const auto* sb = std::get_if<SwitchBudget>(&g.variant)) {
        if (sb->switches > 0) {
            // upper bound: both boards stay available every round
            std::uint64_t first = forced_start
                                      ? (*forced_start == Board::Left ? nl : nr)
                                      : nl + nr;
            std::uint64_t lines = first;
            for (int r = 1; r < rounds; ++r) lines = capped_mul(lines, nl + nr);
            return rounds == 0 ? 1 : lines;
        }
        std::uint64_t total = 0;
        for (Board start : {Board::Left, Board::Right}) {
            if (forced_start && start != *forced_start) continue;
            std::uint64_t lines = 1;
            for (int r = 0; r < rounds; ++r)
                lines = capped_mul(lines, start == Board::Left ? nl : nr);
            total += lines;
        }
        return total;
    }
    // batch schedules: board sizes per round are fixed by the opening board
    std::uint64_t total = 0;
    for (Board start : {Board::Left, Board::Right}) {
        if (forced_start && start != *forced_start) continue;
        std::uint64_t lines = 1;
        Board current = start;
        for (int r = 1; r <= rounds; ++r) {
            lines = capped_mul(lines, current == Board::Left ? nl : nr);
            PlayState probe;
            probe.round_index = r;
            probe.spoiler_board = current;
            current = forced_board(g, probe).value_or(current);
        }
        total += lines;
    }
    return total;
}

SweepReport exhaustive_sweep_serial(const GameInstance& g, const DuplicatorStrategy& prototype,
                                    const SweepLimits& limits, const SweepOptions& options) {
    g.validate();
    const std::uint64_t estimate = estimate_spoiler_lines(g, options.forced_start_board);
    if (estimate > limits.max_lines)
        throw LimitExceededError("estimated " + std::to_string(estimate) +
                                 " lines exceed the limit of " + std::to_string(limits.max_lines));
    SweepReport report = make_report(g, prototype, estimate);
    const auto t0 = Clock::now();

    PlayState start = PlayState::initial(g);
    Counters counters;
    DedupTables tables;
    if (options.symmetry_dedup) tables.ensure(g);
    if (!check_winning(g, start.history).satisfied) {
        // degenerate designated pairs: every line is already lost
        counters.lines = 1;
        counters.losses = 1;
    } else {
        LineWalker walker{g, options, counters, &tables, {}};
        walker.dfs(start, prototype);
    }
    report.lines = counters.lines;
    report.losses = counters.losses;
    report.selfcheck_pass = std::move(counters.selfcheck_pass);
    report.selfcheck_fail = std::move(counters.selfcheck_fail);
    report.first_loss = std::move(counters.first_loss);
    report.wall_seconds = seconds_since(t0);
    report.threads = 1;
    return report;
}

SweepReport exhaustive_sweep_parallel(const GameInstance& g, const DuplicatorStrategy& prototype,
                                      const SweepLimits& limits, const SweepOptions& options) {
    g.validate();
    const std::uint64_t estimate = estimate_spoiler_lines(g, options.forced_start_board);
    if (estimate > limits.max_lines)
        throw LimitExceededError("estimated " + std::to_string(estimate) +
                                 " lines exceed the limit of " + std::to_string(limits.max_lines));
    SweepReport report = make_report(g, prototype, estimate);
    const auto t0 = Clock::now();

    PlayState start = PlayState::initial(g);
    Counters total;
    DedupTables tables;
    if (options.symmetry_dedup) tables.ensure(g);
    if (!check_winning(g, start.history).satisfied) {
        total.lines = 1;
        total.losses = 1;
        report.threads = 1;
    } else {
        const std::vector<Move> openings = opening_moves(g, options, &tables);
        const int n = static_cast<int>(openings.size());
        std::vector<Counters> per_opening(static_cast<size_t>(n));
#ifdef _OPENMP
        report.threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < n; ++i) {
            Counters local;
            LineWalker walker{g, options, local, &tables, {}};
            const Move& move = openings[static_cast<size_t>(i)];
            auto branch = prototype.clone();
            walker.path.emplace_back(move, -1);
            try {
                NodeId reply = branch->respond(move);
                walker.path.back().second = reply;
                PlayState next = play_round(g, start, move, reply);
                if (!check_winning_last(g, next.history).satisfied) {
                    walker.record_loss();
                } else {
                    if (options.selfcheck_each_round) tally_selfcheck(*branch, local);
                    walker.dfs(next, *branch);
                }
            } catch (const Error&) {
                walker.record_loss();
            }
            per_opening[static_cast<size_t>(i)] = std::move(local);
        }
        for (auto& c : per_opening) total.merge(std::move(c));
    }
    report.lines = total.lines;
    report.losses = total.losses;
    report.selfcheck_pass = std::move(total.selfcheck_pass);
    report.selfcheck_fail = std::move(total.selfcheck_fail);
    report.first_loss = std::move(total.first_loss);
    report.wall_seconds = seconds_since(t0);
    return report;
}

SweepReport exhaustive_sweep(const GameInstance& g, const DuplicatorStrategy& prototype,
                             const SweepLimits& limits, const SweepOptions& options) {
#ifdef _OPENMP
    if (estimate_spoiler_lines(g, options.forced_start_board) >= 1000)
        return exhaustive_sweep_parallel(g, prototype, limits, options);
#endif
    return exhaustive_sweep_serial(g, prototype, limits, options);
}

// ---------------------------------------------------------------------------
// Random sweeps.

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t line) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (line + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Plays one random line; returns true when Duplicator survived it.
bool play_random_line(const GameInstance& g, const DuplicatorStrategy& prototype,
                      std::uint64_t line_seed, const SweepOptions& opts, Counters& c) {
    std::mt19937_64 rng(line_seed);
    auto strat = prototype.clone();
    PlayState state = PlayState::initial(g);
    while (!state.game_over(g)) {
        std::vector<Move> moves = legal_spoiler_moves(g, state);
        if (state.round_index == 0 && opts.forced_start_board)
            std::erase_if(moves,
                          [&](const Move& m) { return m.board != *opts.forced_start_board; });
        const Move& move = moves[std::uniform_int_distribution<size_t>(0, moves.size() - 1)(rng)];
        try {
            NodeId reply = strat->respond(move);
            state = play_round(g, state, move, reply);
        } catch (const Error&) {
            return false;
        }
        if (!check_winning_last(g, state.history).satisfied) return false;
        if (opts.selfcheck_each_round) tally_selfcheck(*strat, c);
    }
    return true;
}

} // namespace

SweepReport random_sweep_serial(const GameInstance& g, const DuplicatorStrategy& prototype,
                                std::uint64_t lines, std::uint64_t seed,
                                const SweepOptions& options) {
    g.validate();
    SweepReport report = make_report(g, prototype, lines);
    report.seed = seed;
    const auto t0 = Clock::now();
    Counters counters;
    for (std::uint64_t i = 0; i < lines; ++i) {
        ++counters.lines;
        if (!play_random_line(g, prototype, mix_seed(seed, i), options, counters))
            ++counters.losses;
    }
    report.lines = counters.lines;
    report.losses = counters.losses;
    report.selfcheck_pass = std::move(counters.selfcheck_pass);
    report.selfcheck_fail = std::move(counters.selfcheck_fail);
    report.wall_seconds = seconds_since(t0);
    report.threads = 1;
    return report;
}

SweepReport random_sweep_parallel(const GameInstance& g, const DuplicatorStrategy& prototype,
                                  std::uint64_t lines, std::uint64_t seed,
                                  const SweepOptions& options) {
    g.validate();
    SweepReport report = make_report(g, prototype, lines);
    report.seed = seed;
    const auto t0 = Clock::now();
    std::uint64_t losses = 0;
#ifdef _OPENMP
    report.threads = omp_get_max_threads();
#endif
    std::map<std::string, std::uint64_t> pass, fail;
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        Counters local;
        std::uint64_t local_losses = 0;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 256)
#endif
        for (long long i = 0; i < static_cast<long long>(lines); ++i) {
            if (!play_random_line(g, prototype, mix_seed(seed, static_cast<std::uint64_t>(i)),
                                  options, local))
                ++local_losses;
        }
#ifdef _OPENMP
#pragma omp critical
#endif
        {
            losses += local_losses;
            for (auto& [k, v] : local.selfcheck_pass) pass[k] += v;
            for (auto& [k, v] : local.selfcheck_fail) fail[k] += v;
        }
    }
    report.lines = lines;
    report.losses = losses;
    report.selfcheck_pass = std::move(pass);
    report.selfcheck_fail = std::move(fail);
    report.wall_seconds = seconds_since(t0);
    return report;
}

SweepReport random_sweep(const GameInstance& g, const DuplicatorStrategy& prototype,
                         std::uint64_t lines, std::uint64_t seed, const SweepOptions& options) {
#ifdef _OPENMP
    if (lines >= 256) return random_sweep_parallel(g, prototype, lines, seed, options);
#endif
    return random_sweep_serial(g, prototype, lines, seed, options);
}

} // namespace efg
