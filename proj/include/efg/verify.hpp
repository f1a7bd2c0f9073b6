#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efg/formula.hpp"
#include "efg/solver.hpp"
#include "efg/sweep.hpp"
#include "efg/tree.hpp"

namespace efg {

/// Builds both family trees and checks that the first satisfies the level-s
/// property while the second refutes it, through the direct evaluator and the
/// formula engine both.
struct ConstructionReport {
    int s = 0, k = 0, m = 0;
    long long t1_nodes = 0, t2_nodes = 0;
    bool t1_direct = false, t2_direct = false;   // expected: true / false satisfied
    bool t1_formula = false, t2_formula = false; // formula engine agreement
    double wall_seconds = 0.0;
    bool passed = false;
};

ConstructionReport verify_construction(int s, int k, int m);

// ---------------------------------------------------------------------------
// Formula pools.

struct FormulaPool {
    std::uint64_t seed = 0;
    int qd_max = 0;
    int aqd_max = 0;
    std::vector<FormulaPtr> sentences;
};

/// Deterministic pseudo-random sentence pool over the tree vocabulary, with
/// rejection until qd <= qd_max and syntactic alternation depth <= aqd_max.
/// Always contains the recursive property sentences that fit the bounds.
FormulaPool generate_formula_pool(std::uint64_t seed, int qd_max, int aqd_max, int n);

// ---------------------------------------------------------------------------
// Game-versus-logic consistency.

struct SpotcheckReport {
    Winner winner = Winner::Duplicator;
    int sentences_checked = 0;
    /// Duplicator-win direction: a pooled in-bounds sentence that disagrees
    /// between the boards falsifies the implementation.
    bool counterexample = false;
    std::string counterexample_formula;
    /// Spoiler-win direction: a disagreeing in-bounds sentence, when the pool
    /// happens to contain one (never asserted; the pool is finite).
    bool witness_found = false;
    std::string witness_formula;
    bool passed = false; // no counterexample
};

SpotcheckReport theorem1_spotcheck(const Tree& left, const Tree& right, int s, int r,
                                   const FormulaPool& pool, const SolveLimits& limits = {});

// ---------------------------------------------------------------------------
// The full lower-bound pipeline.

struct PipelineReport {
    int s = 0, k = 0, m = 0;
    ConstructionReport construction;
    std::string win_mode;          // how the fixed-batch win was established
    SweepReport fixed_batch_sweep; // empty when established by the solver only
    bool fixed_batch_win = false;
    SweepReport adapted_sweep;
    bool adapted_win = false;
    bool solver_crosscheck = false; // solver agrees on the switch-budget game
    bool property_separates = false;
    int property_qd = 0, property_aqd = 0;
    std::string verdict;
    std::string failed_step;
    bool passed = false;
};

/// Runs the whole argument at one parameter point (m defaults to s*k):
/// construction satisfaction split, Duplicator's fixed-batch win, the
/// adaptation to one fewer switch, the solver cross-check, and the final
/// verdict that the level-s property separates the pair while nothing of
/// quantifier depth <= k and alternation depth <= s-1 can.
PipelineReport lower_bound_pipeline(int s, int k, std::optional<int> m_opt = std::nullopt,
                                    std::uint64_t exhaustive_limit = 2'000'000,
                                    std::uint64_t random_lines = 100'000,
                                    std::uint64_t seed = 20240915);

} // namespace efg
