#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "efg/errors.hpp"
#include "efg/tree.hpp"

namespace efg {

/// A term of the vocabulary: either the root constant R or a variable.
struct Term {
    bool is_root = false;
    std::string var; // empty when is_root

    static Term root() { return Term{true, {}}; }
    static Term variable(std::string name);
    bool operator==(const Term&) const = default;
};

enum class FormulaKind { Eq, ParentOf, Not, And, Or, Implies, Iff, Exists, Forall };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable FO formula over {R, =, parent-of}. Built through the factory
/// functions below; quantifier construction renames the new bound variable
/// when it would shadow a variable already quantified in the body.
class Formula : public std::enable_shared_from_this<Formula> {
public:
    FormulaKind kind() const { return kind_; }
    const Term& lhs() const { return lhs_; }
    const Term& rhs() const { return rhs_; }
    const FormulaPtr& left() const { return a_; }
    const FormulaPtr& right() const { return b_; }
    const std::string& var() const { return var_; }
    const FormulaPtr& body() const { return a_; }

    bool is_atom() const { return kind_ == FormulaKind::Eq || kind_ == FormulaKind::ParentOf; }
    bool is_quantifier() const {
        return kind_ == FormulaKind::Exists || kind_ == FormulaKind::Forall;
    }

    static FormulaPtr eq(Term a, Term b);
    /// parent_of(child, parent): "parent is the parent of child".
    static FormulaPtr parent_of(Term child, Term parent);
    static FormulaPtr negate(FormulaPtr f);
    static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
    static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
    static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
    static FormulaPtr iff(FormulaPtr a, FormulaPtr b);
    static FormulaPtr exists(const std::string& v, FormulaPtr body);
    static FormulaPtr forall(const std::string& v, FormulaPtr body);

private:
    Formula() = default;
    static FormulaPtr make(FormulaKind kind, Term lhs, Term rhs, FormulaPtr a, FormulaPtr b,
                           std::string var);

    FormulaKind kind_ = FormulaKind::Eq;
    Term lhs_, rhs_;
    FormulaPtr a_, b_;
    std::string var_;
};

bool equal(const FormulaPtr& a, const FormulaPtr& b);

/// Free variables, sorted ascending.
std::vector<std::string> free_variables(const FormulaPtr& f);
bool is_sentence(const FormulaPtr& f);

/// Quantifier nesting depth: atoms 0, connectives take the max of their
/// children, each quantifier adds one.
int qd(const FormulaPtr& f);

/// Negation normal form: -> and <-> expanded, negations pushed to atoms.
/// Preserves truth on every tree/assignment.
FormulaPtr to_nnf(const FormulaPtr& f);

/// Syntactic alternation depth: the NNF is taken first, then the maximum
/// number of exists/forall switches along any nested quantifier chain.
/// Quantifier-free and monotone-prefix formulas give 0. Upper-bounds the
/// semantic alternation depth of the sentence the formula expresses.
int aqd_syntactic(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Evaluation.

using Assignment = std::unordered_map<std::string, NodeId>;

/// Standard Tarskian satisfaction over all vertices of the tree (the root
/// included). parent_of(c, p) is false whenever c is the root. Throws
/// UnboundVariableError if the assignment misses a free variable.
bool eval_formula(const Tree& tree, const FormulaPtr& phi, const Assignment& env = {});

/// Evaluator for repeated queries of one formula against one tree; caches
/// subformula values keyed by the restriction of the environment to the
/// subformula's free variables.
class FormulaEvaluator {
public:
    FormulaEvaluator(const Tree& tree, FormulaPtr phi);
    bool eval(const Assignment& env = {});

private:
    struct NodeInfo {
        const Formula* f;
        std::vector<std::string> free_vars;
    };
    const Tree& tree_;
    FormulaPtr root_;
    std::vector<NodeInfo> info_;
    std::unordered_map<const Formula*, int> index_;
    // packed (node, free-variable values) keys when they fit 64 bits,
    // string keys otherwise
    bool packed_keys_ = false;
    std::unordered_map<std::uint64_t, bool> memo_packed_;
    std::unordered_map<std::string, bool> memo_;

    int index_of(const Formula* f) const { return index_.at(f); }
    bool eval_node(const Formula* f, std::vector<std::pair<std::string, NodeId>>& scope);
    NodeId value_of(const Term& t, const std::vector<std::pair<std::string, NodeId>>& scope) const;
};

// ---------------------------------------------------------------------------
// The recursive property family.

/// P_0(x): x has no child. P_i(x): every child y of x fails P_{i-1}(y).
/// Bound variable names are fresh per nesting level.
FormulaPtr formula_for_P(int i, const Term& subject);
/// The sentence P_i(R).
FormulaPtr formula_for_KEIN(int i);

/// Direct recursive evaluation of P_i at vertex v, bypassing the formula
/// engine; memoized per call over (level, vertex).
bool eval_P_direct(const Tree& tree, int i, NodeId v);

// ---------------------------------------------------------------------------
// Surface syntax.
//
//   E x . phi      A x . phi      !phi
//   phi & psi      phi | psi      phi -> psi      phi <-> psi
//   x = y    x = R    pi(y) = x    pi(y) = R
//
// Precedence, loosest first: <->, ->, |, &, !; quantifier bodies extend as
// far right as possible. -> associates to the right.

FormulaPtr parse_formula(const std::string& text);
std::string print_formula(const FormulaPtr& f);

} // namespace efg
