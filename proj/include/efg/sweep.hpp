#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "efg/game.hpp"

namespace efg {

struct SweepLimits {
    std::uint64_t max_lines = 50'000'000;
};

struct SweepOptions {
    bool selfcheck_each_round = false; // tally recursive-session condition checks
    std::optional<Board> forced_start_board;
    /// Collapse interchangeable Spoiler moves by canonical code. Exact for
    /// loss detection, but line counts shrink; off by default.
    bool symmetry_dedup = false;
};

struct SweepReport {
    std::string instance_summary;
    std::string strategy_name;
    std::uint64_t lines = 0;
    std::uint64_t losses = 0;
    std::uint64_t estimated_lines = 0;
    std::uint64_t seed = 0; // random sweeps only
    double wall_seconds = 0.0;
    int threads = 1;
    std::map<std::string, std::uint64_t> selfcheck_pass;
    std::map<std::string, std::uint64_t> selfcheck_fail;
    std::vector<std::pair<Move, NodeId>> first_loss; // one losing line, when any

    bool passed() const { return losses == 0; }
};

/// Upper bound on the number of legal Spoiler lines, the product of board
/// sizes over the rounds summed over the allowed opening boards.
std::uint64_t estimate_spoiler_lines(const GameInstance& g,
                                     std::optional<Board> forced_start = std::nullopt);

/// Drives a clone of `prototype` down every legal Spoiler line. A line ends
/// at the final round or at the first violated pair (counted as one losing
/// line). Throws LimitExceededError when the up-front estimate busts the
/// limit. The serial form is the reference implementation; the parallel form
/// partitions the opening moves across OpenMP threads and merges counts,
/// producing identical totals.
SweepReport exhaustive_sweep_serial(const GameInstance& g, const DuplicatorStrategy& prototype,
                                    const SweepLimits& limits = {},
                                    const SweepOptions& options = {});
SweepReport exhaustive_sweep_parallel(const GameInstance& g, const DuplicatorStrategy& prototype,
                                      const SweepLimits& limits = {},
                                      const SweepOptions& options = {});
/// Parallel when OpenMP is available and the estimate is large enough to pay
/// for it, serial otherwise.
SweepReport exhaustive_sweep(const GameInstance& g, const DuplicatorStrategy& prototype,
                             const SweepLimits& limits = {}, const SweepOptions& options = {});

/// Seeded random Spoiler lines, uniform over the legal moves each round.
/// Line i draws from a generator seeded by mix(seed, i), so totals do not
/// depend on the thread count.
SweepReport random_sweep_serial(const GameInstance& g, const DuplicatorStrategy& prototype,
                                std::uint64_t lines, std::uint64_t seed,
                                const SweepOptions& options = {});
SweepReport random_sweep_parallel(const GameInstance& g, const DuplicatorStrategy& prototype,
                                  std::uint64_t lines, std::uint64_t seed,
                                  const SweepOptions& options = {});
SweepReport random_sweep(const GameInstance& g, const DuplicatorStrategy& prototype,
                         std::uint64_t lines, std::uint64_t seed,
                         const SweepOptions& options = {});

} // namespace efg
