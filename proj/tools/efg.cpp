// efg — build the recursive tree families, evaluate the KEIN properties,
// solve and play the three Ehrenfeucht game variants, and run the
// verification pipelines. Exit codes: 0 pass, 1 verification failure,
// 2 usage or parameter error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "efg/adaptors.hpp"
#include "efg/formula.hpp"
#include "efg/solver.hpp"
#include "efg/strategy.hpp"
#include "efg/sweep.hpp"
#include "efg/tree.hpp"
#include "efg/verify.hpp"

using namespace efg;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

json sweep_to_json(const SweepReport& r) {
    json j{{"instance", r.instance_summary},
           {"strategy", r.strategy_name},
           {"lines", r.lines},
           {"losses", r.losses},
           {"estimated_lines", r.estimated_lines},
           {"wall_seconds", r.wall_seconds},
           {"threads", r.threads}};
    if (r.seed) j["seed"] = r.seed;
    if (!r.selfcheck_pass.empty() || !r.selfcheck_fail.empty()) {
        j["selfcheck_pass"] = r.selfcheck_pass;
        j["selfcheck_fail"] = r.selfcheck_fail;
    }
    return j;
}

std::vector<std::pair<NodeId, NodeId>> load_designated(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open designated-pairs file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad designated-pairs JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("pairs") || !j["pairs"].is_array())
        throw ParseError("designated-pairs file must hold {\"pairs\": [[x,y],...]}");
    std::vector<std::pair<NodeId, NodeId>> out;
    for (const auto& p : j["pairs"]) {
        if (!p.is_array() || p.size() != 2)
            throw ParseError("each designated pair must be a two-element array");
        out.emplace_back(p[0].get<NodeId>(), p[1].get<NodeId>());
    }
    return out;
}

struct LoadedGame {
    Tree left, right;
    GameInstance instance;
};

LoadedGame load_game(const std::string& left_path, const std::string& right_path,
                     const std::string& variant_text, const std::string& designated_path) {
    LoadedGame g{load_tree_file(left_path), load_tree_file(right_path), {}};
    g.instance.left = BoardView::whole(g.left);
    g.instance.right = BoardView::whole(g.right);
    g.instance.variant = variant_from_string(variant_text);
    if (!designated_path.empty()) g.instance.designated = load_designated(designated_path);
    g.instance.validate();
    return g;
}

/// Solver-backed engine for instances Duplicator cannot win: keep the
/// configuration clean as long as any reply does, prefer replies that stay
/// winning when they exist.
class BestEffortStrategy final : public DuplicatorStrategy {
public:
    explicit BestEffortStrategy(std::shared_ptr<SolverCore> core)
        : core_(std::move(core)), state_(PlayState::initial(core_->instance())) {}
    std::unique_ptr<DuplicatorStrategy> clone() const override {
        return std::make_unique<BestEffortStrategy>(*this);
    }
    NodeId respond(const Move& spoiler) override {
        const GameInstance& g = core_->instance();
        std::optional<NodeId> clean;
        for (NodeId reply : g.board(other(spoiler.board)).vertices()) {
            PlayState next = play_round(g, state_, spoiler, reply);
            if (!check_winning_last(g, next.history).satisfied) continue;
            if (!clean) clean = reply;
            if (core_->duplicator_wins(next)) {
                state_ = std::move(next);
                return reply;
            }
        }
        NodeId reply = clean.value_or(g.board(other(spoiler.board)).root);
        state_ = play_round(g, state_, spoiler, reply);
        return reply;
    }
    std::string name() const override { return "best-effort"; }

private:
    std::shared_ptr<SolverCore> core_;
    PlayState state_;
};

std::unique_ptr<DuplicatorStrategy> pick_engine(const GameInstance& g, const std::string& which) {
    if (which == "paper") return PaperStrategy::make(g);
    if (which == "minimax") {
        Outcome out = solve_minimax(g);
        if (out.winner == Winner::Duplicator) return out.make_strategy();
        std::cout << "note: Spoiler wins this instance; the engine plays best resistance.\n";
        return std::make_unique<BestEffortStrategy>(out.core);
    }
    // auto: the recursive strategy when the instance fits it, the solver otherwise
    try {
        return PaperStrategy::make(g);
    } catch (const Error&) {
        return pick_engine(g, "minimax");
    }
}

int run_game_play(const LoadedGame& g, const std::string& engine_kind,
                  const std::string& transcript_path) {
    auto engine = pick_engine(g.instance, engine_kind);
    std::cout << "You are Spoiler. Moves look like 'L 4' or 'R 7'. Boards: left has "
              << g.instance.left.size() << " vertices, right has " << g.instance.right.size()
              << ".\n";
    PlayState state = PlayState::initial(g.instance);
    Transcript transcript;
    transcript.variant = g.instance.variant;
    transcript.designated = g.instance.designated;
    const int rounds = total_rounds(g.instance.variant);
    for (int round = 1; round <= rounds; ++round) {
        auto forced = forced_board(g.instance, state);
        std::cout << "round " << round << (forced ? std::string(" (board ") +
                                                        board_letter(*forced) + " forced)"
                                                  : "")
                  << " > " << std::flush;
        std::string board_text;
        long vertex = -1;
        if (!(std::cin >> board_text >> vertex)) {
            std::cout << "\nno more input; stopping.\n";
            break;
        }
        Board b;
        if (board_text == "L" || board_text == "l") b = Board::Left;
        else if (board_text == "R" || board_text == "r") b = Board::Right;
        else {
            std::cout << "unknown board '" << board_text << "', use L or R\n";
            --round;
            continue;
        }
        Move mv{b, static_cast<NodeId>(vertex)};
        std::string why;
        if (!is_legal_spoiler_move(g.instance, state, mv, &why)) {
            std::cout << "illegal move: " << why << "\n";
            --round;
            continue;
        }
        NodeId reply = engine->respond(mv);
        state = play_round(g.instance, state, mv, reply);
        transcript.rounds.emplace_back(mv, reply);
        WinCheck wc = check_winning(g.instance, state.history);
        std::cout << "  engine answers " << board_letter(other(b)) << ":" << reply
                  << "  [conditions " << (wc.satisfied ? "hold" : ("violated at " + wc.condition))
                  << "]\n";
        if (const auto* paper = dynamic_cast<const PaperStrategy*>(engine.get())) {
            auto report = paper->selfcheck();
            std::cout << "  selfcheck: " << (report.all_pass ? "all conditions pass" : report.detail)
                      << "\n";
        }
        if (!wc.satisfied) break;
    }
    WinCheck final = check_winning(g.instance, state.history);
    transcript.result = final.satisfied ? "duplicator" : "spoiler";
    std::cout << "result: " << *transcript.result << "\n";
    if (!transcript_path.empty()) {
        std::ofstream out(transcript_path);
        out << write_transcript(transcript);
        std::cout << "transcript written to " << transcript_path << "\n";
    }
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ehrenfeucht games on the recursive rooted-tree families"};
    app.require_subcommand(1);
    app.fallthrough(); // parent-level flags may trail subcommand options
    bool as_json = false;
    app.add_flag("--json", as_json, "emit reports as JSON");

    // tree build
    auto* tree_cmd = app.add_subcommand("tree", "build and export family trees");
    tree_cmd->require_subcommand(1);
    auto* tree_build = tree_cmd->add_subcommand("build", "build T1/T2 at (s,k,m)");
    std::string role_text = "T1", out_path, dot_path;
    int p_s = 1, p_k = 1, p_m = 1;
    tree_build->add_option("--role", role_text, "T1 or T2")->required();
    tree_build->add_option("--s", p_s, "recursion level")->required();
    tree_build->add_option("--k", p_k, "batch length")->required();
    tree_build->add_option("--m", p_m, "branching parameter (m >= s*k)")->required();
    tree_build->add_option("--out", out_path, "write JSON here (default: stdout)");
    tree_build->add_option("--dot", dot_path, "also write a DOT rendering");

    // prop eval
    auto* prop_cmd = app.add_subcommand("prop", "evaluate the recursive properties");
    prop_cmd->require_subcommand(1);
    auto* prop_eval = prop_cmd->add_subcommand("eval", "evaluate P_i at a vertex");
    std::string prop_tree_path;
    int prop_i = 0;
    std::optional<int> prop_vertex;
    prop_eval->add_option("--tree", prop_tree_path, "tree JSON file")->required();
    prop_eval->add_option("--i", prop_i, "property index")->required();
    prop_eval->add_option("--vertex", prop_vertex, "vertex id (default: root)");

    // formula qd|aqd|eval
    auto* formula_cmd = app.add_subcommand("formula", "inspect formulas");
    formula_cmd->require_subcommand(1);
    std::string formula_text, formula_tree_path;
    auto* f_qd = formula_cmd->add_subcommand("qd", "quantifier depth");
    auto* f_aqd = formula_cmd->add_subcommand("aqd", "syntactic alternation depth");
    auto* f_eval = formula_cmd->add_subcommand("eval", "evaluate a sentence on a tree");
    auto* f_kein = formula_cmd->add_subcommand("kein", "print the level-i property sentence");
    for (CLI::App* sub : {f_qd, f_aqd, f_eval})
        sub->add_option("--formula", formula_text, "surface-syntax formula")->required();
    f_eval->add_option("--tree", formula_tree_path, "tree JSON file")->required();
    int kein_i = 0;
    f_kein->add_option("--i", kein_i, "property index")->required();

    // game solve|play|replay
    auto* game_cmd = app.add_subcommand("game", "solve and play games");
    game_cmd->require_subcommand(1);
    std::string left_path, right_path, variant_text, designated_path, engine_kind = "auto",
                transcript_path;
    auto* g_solve = game_cmd->add_subcommand("solve", "exact winner under optimal play");
    auto* g_play = game_cmd->add_subcommand("play", "interactive play against the engine");
    auto* g_replay = game_cmd->add_subcommand("replay", "re-run a transcript in batch mode");
    for (CLI::App* sub : {g_solve, g_play, g_replay}) {
        sub->add_option("--left", left_path, "left tree JSON")->required();
        sub->add_option("--right", right_path, "right tree JSON")->required();
    }
    for (CLI::App* sub : {g_solve, g_play})
        sub->add_option("--variant", variant_text, "switch:s,r | batch:s,k | sizes:i1,i2,...")
            ->required();
    g_solve->add_option("--designated", designated_path, "designated pairs JSON");
    std::string human = "spoiler";
    g_play->add_option("--human", human, "side played by the human (spoiler)")
        ->check(CLI::IsMember({"spoiler"}));
    g_play->add_option("--designated", designated_path, "designated pairs JSON");
    g_play->add_option("--strategy", engine_kind, "engine: auto|paper|minimax")
        ->check(CLI::IsMember({"auto", "paper", "minimax"}));
    g_play->add_option("--transcript", transcript_path, "write the transcript here");
    std::string replay_path;
    g_replay->add_option("--transcript", replay_path, "transcript to replay")->required();

    // verify construction|sweep|theorem1|lower-bound
    auto* verify_cmd = app.add_subcommand("verify", "verification pipelines");
    verify_cmd->require_subcommand(1);
    auto* v_cons = verify_cmd->add_subcommand("construction", "satisfaction split at (s,k,m)");
    auto* v_sweep = verify_cmd->add_subcommand("sweep", "strategy versus every Spoiler line");
    auto* v_thm = verify_cmd->add_subcommand("theorem1", "pool spot check of the game/logic bridge");
    auto* v_lb = verify_cmd->add_subcommand("lower-bound", "the full pipeline at (s,k)");
    int v_s = 1, v_k = 1;
    std::optional<int> v_m;
    for (CLI::App* sub : {v_cons, v_sweep, v_lb}) {
        sub->add_option("--s", v_s, "recursion level")->required();
        sub->add_option("--k", v_k, "batch length")->required();
    }
    v_cons->add_option("--m", v_m, "branching parameter (default s*k)");
    v_sweep->add_option("--m", v_m, "branching parameter (default s*k)");
    v_lb->add_option("--m", v_m, "branching parameter (default s*k)");
    std::uint64_t v_random = 0, v_seed = 20240915;
    bool v_selfcheck = false, v_serial = false;
    std::string v_start;
    v_sweep->add_option("--random", v_random, "random lines instead of exhaustive");
    v_sweep->add_option("--seed", v_seed, "seed for random lines");
    v_sweep->add_flag("--selfcheck", v_selfcheck, "re-check strategy conditions every round");
    v_sweep->add_flag("--serial", v_serial, "use the serial reference sweep");
    v_sweep->add_option("--start", v_start, "force Spoiler's opening board (L|R)")
        ->check(CLI::IsMember({"L", "R"}));
    std::string thm_left, thm_right;
    int thm_s = 1, thm_r = 1, pool_qd = 2, pool_aqd = 1, pool_n = 200;
    std::uint64_t pool_seed = 424242;
    v_thm->add_option("--left", thm_left, "left tree JSON")->required();
    v_thm->add_option("--right", thm_right, "right tree JSON")->required();
    v_thm->add_option("--s", thm_s, "switch budget")->required();
    v_thm->add_option("--r", thm_r, "rounds")->required();
    v_thm->add_option("--pool-seed", pool_seed, "sentence pool seed");
    v_thm->add_option("--pool-size", pool_n, "sentence pool size");
    v_thm->add_option("--qd-max", pool_qd, "pool quantifier-depth bound");
    v_thm->add_option("--aqd-max", pool_aqd, "pool alternation-depth bound");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tree_build->parsed()) {
            Tree t = build_construction(role_from_name(role_text), p_s, p_k, p_m);
            std::string payload = serialize(t, TreeFormat::Json);
            if (out_path.empty())
                std::cout << payload;
            else
                save_tree_file(t, out_path);
            if (!dot_path.empty()) {
                std::ofstream dot(dot_path);
                dot << serialize(t, TreeFormat::Dot);
            }
            return kExitPass;
        }

        if (prop_eval->parsed()) {
            Tree t = load_tree_file(prop_tree_path);
            NodeId v = prop_vertex.value_or(t.root());
            bool result = eval_P_direct(t, prop_i, v);
            if (as_json)
                std::cout << json{{"i", prop_i}, {"vertex", v}, {"value", result}}.dump() << "\n";
            else
                std::cout << (result ? "true" : "false") << "\n";
            return kExitPass;
        }

        if (f_qd->parsed() || f_aqd->parsed()) {
            FormulaPtr f = parse_formula(formula_text);
            int value = f_qd->parsed() ? qd(f) : aqd_syntactic(f);
            if (as_json)
                std::cout << json{{"formula", print_formula(f)},
                                  {f_qd->parsed() ? "qd" : "aqd", value}}
                                 .dump()
                          << "\n";
            else
                std::cout << value << "\n";
            return kExitPass;
        }
        if (f_eval->parsed()) {
            FormulaPtr f = parse_formula(formula_text);
            if (!is_sentence(f)) throw ParameterError("eval needs a sentence (no free variables)");
            Tree t = load_tree_file(formula_tree_path);
            bool result = eval_formula(t, f);
            std::cout << (result ? "true" : "false") << "\n";
            return kExitPass;
        }
        if (f_kein->parsed()) {
            std::cout << print_formula(formula_for_KEIN(kein_i)) << "\n";
            return kExitPass;
        }

        if (g_solve->parsed()) {
            LoadedGame g = load_game(left_path, right_path, variant_text, designated_path);
            Outcome out = solve_minimax(g.instance);
            const char* who = out.winner == Winner::Duplicator ? "duplicator" : "spoiler";
            if (as_json) {
                json j{{"winner", who}};
                if (!out.losing_line.empty()) {
                    json line = json::array();
                    for (const auto& [mv, dup] : out.losing_line)
                        line.push_back({{"board", std::string(1, board_letter(mv.board))},
                                        {"spoiler", mv.vertex},
                                        {"duplicator", dup}});
                    j["forcing_line"] = line;
                }
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "winner: " << who << "\n";
                for (const auto& [mv, dup] : out.losing_line)
                    std::cout << "  spoiler " << board_letter(mv.board) << ":" << mv.vertex
                              << " -> duplicator " << board_letter(other(mv.board)) << ":" << dup
                              << "\n";
            }
            return kExitPass;
        }

        if (g_play->parsed()) {
            LoadedGame g = load_game(left_path, right_path, variant_text, designated_path);
            return run_game_play(g, engine_kind, transcript_path);
        }

        if (g_replay->parsed()) {
            Tree left = load_tree_file(left_path);
            Tree right = load_tree_file(right_path);
            std::ifstream in(replay_path);
            if (!in) throw ParseError("cannot open transcript '" + replay_path + "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            Transcript t = parse_transcript(buf.str());
            GameInstance g{BoardView::whole(left), BoardView::whole(right), t.variant,
                           t.designated};
            WinCheck wc = replay_transcript(g, t);
            std::cout << "result: " << (wc.satisfied ? "duplicator" : "spoiler") << "\n";
            if (t.result) {
                bool matches = (*t.result == (wc.satisfied ? "duplicator" : "spoiler"));
                std::cout << "transcript result " << (matches ? "matches" : "DIFFERS") << "\n";
                return matches ? kExitPass : kExitFail;
            }
            return kExitPass;
        }

        if (v_cons->parsed()) {
            ConstructionReport r = verify_construction(v_s, v_k, v_m.value_or(v_s * v_k));
            if (as_json) {
                std::cout << json{{"s", r.s},           {"k", r.k},
                                  {"m", r.m},           {"t1_nodes", r.t1_nodes},
                                  {"t2_nodes", r.t2_nodes}, {"t1_direct", r.t1_direct},
                                  {"t2_direct", r.t2_direct}, {"t1_formula", r.t1_formula},
                                  {"t2_formula", r.t2_formula}, {"wall_seconds", r.wall_seconds},
                                  {"passed", r.passed}}
                                 .dump(2)
                          << "\n";
            } else {
                std::cout << (r.passed ? "PASS" : "FAIL") << " construction (s=" << r.s
                          << ", k=" << r.k << ", m=" << r.m << "): first tree "
                          << (r.t1_direct && r.t1_formula ? "satisfies" : "VIOLATES")
                          << " the property, second tree "
                          << (r.t2_direct && r.t2_formula ? "refutes" : "VIOLATES") << " it\n";
            }
            return r.passed ? kExitPass : kExitFail;
        }

        if (v_sweep->parsed()) {
            const int m = v_m.value_or(v_s * v_k);
            Tree t1 = build_construction(Role::T1, v_s, v_k, m);
            Tree t2 = build_construction(Role::T2, v_s, v_k, m);
            GameInstance g{BoardView::whole(t1), BoardView::whole(t2), FixedBatches{v_s, v_k}, {}};
            auto strat = PaperStrategy::make(g);
            SweepOptions opts;
            opts.selfcheck_each_round = v_selfcheck;
            if (!v_start.empty())
                opts.forced_start_board = v_start == "L" ? Board::Left : Board::Right;
            SweepReport r;
            if (v_random > 0)
                r = v_serial ? random_sweep_serial(g, *strat, v_random, v_seed, opts)
                             : random_sweep(g, *strat, v_random, v_seed, opts);
            else
                r = v_serial ? exhaustive_sweep_serial(g, *strat, SweepLimits{}, opts)
                             : exhaustive_sweep(g, *strat, SweepLimits{}, opts);
            if (as_json)
                std::cout << sweep_to_json(r).dump(2) << "\n";
            else
                std::cout << (r.passed() ? "PASS" : "FAIL") << " sweep: " << r.lines << " lines, "
                          << r.losses << " losses, " << r.wall_seconds << "s on " << r.threads
                          << " thread(s)\n";
            return r.passed() ? kExitPass : kExitFail;
        }

        if (v_thm->parsed()) {
            Tree left = load_tree_file(thm_left);
            Tree right = load_tree_file(thm_right);
            FormulaPool pool = generate_formula_pool(pool_seed, pool_qd, pool_aqd, pool_n);
            SpotcheckReport r = theorem1_spotcheck(left, right, thm_s, thm_r, pool);
            if (as_json) {
                json j{{"winner", r.winner == Winner::Duplicator ? "duplicator" : "spoiler"},
                       {"sentences_checked", r.sentences_checked},
                       {"counterexample", r.counterexample},
                       {"witness_found", r.witness_found},
                       {"passed", r.passed}};
                if (r.counterexample) j["counterexample_formula"] = r.counterexample_formula;
                if (r.witness_found) j["witness_formula"] = r.witness_formula;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << (r.passed ? "PASS" : "FAIL") << " spot check: "
                          << (r.winner == Winner::Duplicator ? "duplicator" : "spoiler")
                          << " wins; " << r.sentences_checked << " sentences checked";
                if (r.witness_found) std::cout << "; witness: " << r.witness_formula;
                if (r.counterexample)
                    std::cout << "; COUNTEREXAMPLE: " << r.counterexample_formula;
                std::cout << "\n";
            }
            return r.passed ? kExitPass : kExitFail;
        }

        if (v_lb->parsed()) {
            PipelineReport r = lower_bound_pipeline(v_s, v_k, v_m);
            if (as_json) {
                json j{{"s", r.s},
                       {"k", r.k},
                       {"m", r.m},
                       {"construction_passed", r.construction.passed},
                       {"win_mode", r.win_mode},
                       {"fixed_batch_sweep", sweep_to_json(r.fixed_batch_sweep)},
                       {"adapted_sweep", sweep_to_json(r.adapted_sweep)},
                       {"solver_crosscheck", r.solver_crosscheck},
                       {"property_separates", r.property_separates},
                       {"property_qd", r.property_qd},
                       {"property_aqd", r.property_aqd},
                       {"verdict", r.verdict},
                       {"passed", r.passed}};
                if (!r.failed_step.empty()) j["failed_step"] = r.failed_step;
                std::cout << j.dump(2) << "\n";
            } else if (r.passed) {
                std::cout << "PASS lower bound (s=" << r.s << ", k=" << r.k << ", m=" << r.m
                          << "): " << r.verdict << "\n";
            } else {
                std::cout << "FAIL lower bound at step: " << r.failed_step << "\n";
            }
            return r.passed ? kExitPass : kExitFail;
        }
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const StructureError& e) {
        std::cerr << "structural error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const BudgetExceededError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitUsage;
    } catch (const LimitExceededError& e) {
        std::cerr << "limit exceeded: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
