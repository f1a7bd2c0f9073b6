#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "efg/formula.hpp"
#include "efg/tree.hpp"
#include "test_util.hpp"

using namespace efg;

namespace {

// "there exists a vertex with precisely one child"
FormulaPtr one_child_sentence() {
    return parse_formula("E x . E y . (pi(y) = x & A z . (pi(z) = x -> z = y))");
}

} // namespace

TEST_CASE("surface syntax parses and prints back") {
    for (const char* text : {
             "E x . E y . (pi(y) = x & A z . (pi(z) = x -> z = y))",
             "x = R",
             "pi(y) = R",
             "!(x = y) | pi(x) = y",
             "A x . (x = R -> E y . pi(y) = x)",
             "a = b & b = c & c = d",
             "a = b -> b = c -> c = d",
             "(a = b <-> b = c) <-> c = d",
         }) {
        FormulaPtr f = parse_formula(text);
        FormulaPtr again = parse_formula(print_formula(f));
        CHECK(equal(f, again));
    }
    CHECK_THROWS_AS(parse_formula("E x ."), ParseError);
    CHECK_THROWS_AS(parse_formula("x ="), ParseError);
    CHECK_THROWS_AS(parse_formula("x = y extra"), ParseError);
    CHECK_THROWS_AS(parse_formula("pi x = y"), ParseError);
}

TEST_CASE("parse/print round-trip holds on random formulas") {
    std::mt19937_64 rng(101);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        FormulaPtr f = test::random_sentence(rng, 4);
        FormulaPtr again = parse_formula(print_formula(f));
        CHECK(equal(f, again));
        ++checked;
    }
    CHECK(checked == 300);
}

TEST_CASE("quantifier construction renames shadowed variables") {
    FormulaPtr inner = Formula::exists("x", Formula::eq(Term::variable("x"), Term::root()));
    FormulaPtr outer = Formula::exists(
        "x", Formula::conj(Formula::eq(Term::variable("x"), Term::root()), inner));
    CHECK(outer->var() != inner->var());
    CHECK(is_sentence(outer));
    // parsing shadowed input also yields distinct binders
    FormulaPtr parsed = parse_formula("E x . (x = R & E x . x = R)");
    CHECK(parsed->var() != parsed->body()->right()->var());
}

TEST_CASE("qd") {
    CHECK(qd(Formula::eq(Term::root(), Term::root())) == 0);
    CHECK(qd(one_child_sentence()) == 3);
    CHECK(qd(formula_for_KEIN(0)) == 1);
    for (int i = 0; i <= 5; ++i) CHECK(qd(formula_for_KEIN(i)) == i + 1);
}

TEST_CASE("syntactic alternation depth") {
    CHECK(aqd_syntactic(formula_for_KEIN(0)) == 0);
    CHECK(aqd_syntactic(one_child_sentence()) == 1);
    CHECK(aqd_syntactic(formula_for_KEIN(2)) == 2);
    for (int i = 0; i <= 5; ++i) CHECK(aqd_syntactic(formula_for_KEIN(i)) == i);

    // purely existential / universal prefixes count no switches
    FormulaPtr mono = parse_formula("E x . E y . E z . pi(y) = x & pi(z) = y");
    CHECK(aqd_syntactic(mono) == 0);
    FormulaPtr mono2 = parse_formula("A x . A y . !pi(y) = x");
    CHECK(aqd_syntactic(mono2) == 0);
    // negating a monotone prefix still alternates nothing by itself
    CHECK(aqd_syntactic(Formula::negate(mono)) == 0);
}

TEST_CASE("aqd is bounded by qd and stable under nnf; qd invariant under nnf") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 300; ++trial) {
        FormulaPtr f = test::random_sentence(rng, 4);
        CHECK(aqd_syntactic(f) <= qd(f));
        FormulaPtr n = to_nnf(f);
        CHECK(qd(n) == qd(f));
        CHECK(aqd_syntactic(n) == aqd_syntactic(f));
    }
}

TEST_CASE("evaluation basics") {
    Tree leaf = Tree::from_parents({std::nullopt});
    CHECK(eval_formula(leaf, Formula::eq(Term::root(), Term::root())));
    CHECK_FALSE(eval_formula(leaf, one_child_sentence()));

    Tree t2 = build_construction(Role::T2, 1, 1, 1);
    CHECK(eval_formula(t2, one_child_sentence()));

    // parent relation: nothing is the root's parent
    CHECK_FALSE(eval_formula(leaf, parse_formula("E x . pi(R) = x")));
    Tree path2 = Tree::from_parents({std::nullopt, 0});
    CHECK(eval_formula(path2, parse_formula("E x . pi(x) = R")));

    CHECK_THROWS_AS(eval_formula(leaf, Formula::eq(Term::variable("x"), Term::root())),
                    UnboundVariableError);
    Assignment env{{"x", 0}};
    CHECK(eval_formula(leaf, Formula::eq(Term::variable("x"), Term::root()), env));
}

TEST_CASE("nnf and double negation preserve truth on random inputs") {
    std::mt19937_64 rng(303);
    int cases = 0;
    while (cases < 600) {
        Tree t = test::random_tree(rng, 1 + static_cast<int>(rng() % 12));
        FormulaPtr f = test::random_sentence(rng, 3);
        bool direct = eval_formula(t, f);
        CHECK(eval_formula(t, to_nnf(f)) == direct);
        CHECK(eval_formula(t, Formula::negate(Formula::negate(f))) == direct);
        ++cases;
    }
}

TEST_CASE("the recursive property formulas") {
    CHECK(print_formula(formula_for_P(0, Term::variable("x"))) == "A y1 . !pi(y1) = x");
    CHECK(print_formula(formula_for_KEIN(0)) == "A y1 . !pi(y1) = R");
    CHECK(is_sentence(formula_for_KEIN(3)));
    CHECK_THROWS_AS(formula_for_P(-1, Term::root()), ParameterError);
}

TEST_CASE("direct property evaluation") {
    Tree leaf = Tree::from_parents({std::nullopt});
    CHECK(eval_P_direct(leaf, 0, 0));

    Tree t1 = build_construction(Role::T1, 1, 1, 1);
    Tree t2 = build_construction(Role::T2, 1, 1, 1);
    CHECK(eval_P_direct(t1, 1, t1.root()));
    CHECK_FALSE(eval_P_direct(t2, 1, t2.root()));
}

TEST_CASE("formula engine agrees with the direct evaluator everywhere") {
    for (int s = 1; s <= 3; ++s)
        for (int k = 1; k <= 2; ++k) {
            const int m = s * k;
            for (Role role : {Role::T1, Role::T2}) {
                Tree t = build_construction(role, s, k, m);
                for (int i = 0; i <= 4; ++i) {
                    FormulaEvaluator ev(t, formula_for_P(i, Term::variable("x")));
                    for (NodeId v = 0; v < t.size(); ++v) {
                        if (ev.eval({{"x", v}}) != eval_P_direct(t, i, v)) {
                            CAPTURE(s);
                            CAPTURE(k);
                            CAPTURE(i);
                            CAPTURE(v);
                            FAIL_CHECK("evaluators disagree");
                        }
                    }
                }
            }
        }
    CHECK(true);
}
