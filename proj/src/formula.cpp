#include "efg/formula.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

namespace efg {

namespace {

bool reserved_word(const std::string& s) {
    return s == "R" || s == "E" || s == "A" || s == "pi";
}

bool valid_var_name(const std::string& s) {
    if (s.empty() || reserved_word(s)) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '\'') return false;
    return true;
}

void collect_names(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& all) {
    switch (f->kind()) {
    case FormulaKind::Eq:
    case FormulaKind::ParentOf:
        if (!f->lhs().is_root) all.insert(f->lhs().var);
        if (!f->rhs().is_root) all.insert(f->rhs().var);
        return;
    case FormulaKind::Not:
        collect_names(f->left(), bound, all);
        return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
        collect_names(f->left(), bound, all);
        collect_names(f->right(), bound, all);
        return;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
        bound.insert(f->var());
        all.insert(f->var());
        collect_names(f->body(), bound, all);
        return;
    }
}

FormulaPtr subst_free(const FormulaPtr& f, const std::string& name, const Term& repl) {
    auto term = [&](const Term& t) { return (!t.is_root && t.var == name) ? repl : t; };
    switch (f->kind()) {
    case FormulaKind::Eq:
        return Formula::eq(term(f->lhs()), term(f->rhs()));
    case FormulaKind::ParentOf:
        return Formula::parent_of(term(f->lhs()), term(f->rhs()));
    case FormulaKind::Not:
        return Formula::negate(subst_free(f->left(), name, repl));
    case FormulaKind::And:
        return Formula::conj(subst_free(f->left(), name, repl), subst_free(f->right(), name, repl));
    case FormulaKind::Or:
        return Formula::disj(subst_free(f->left(), name, repl), subst_free(f->right(), name, repl));
    case FormulaKind::Implies:
        return Formula::implies(subst_free(f->left(), name, repl),
                                subst_free(f->right(), name, repl));
    case FormulaKind::Iff:
        return Formula::iff(subst_free(f->left(), name, repl), subst_free(f->right(), name, repl));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
        if (f->var() == name) return f; // occurrences below are bound, not free
        // only called with fresh replacement names, so capture cannot happen
        assert(repl.is_root || repl.var != f->var());
        auto body = subst_free(f->body(), name, repl);
        return f->kind() == FormulaKind::Exists ? Formula::exists(f->var(), std::move(body))
                                                : Formula::forall(f->var(), std::move(body));
    }
    }
    throw Error("unreachable formula kind");
}

} // namespace

Term Term::variable(std::string name) {
    if (!valid_var_name(name)) throw ParameterError("invalid variable name '" + name + "'");
    return Term{false, std::move(name)};
}

FormulaPtr Formula::make(FormulaKind kind, Term lhs, Term rhs, FormulaPtr a, FormulaPtr b,
                         std::string var) {
    auto node = std::shared_ptr<Formula>(new Formula());
    node->kind_ = kind;
    node->lhs_ = std::move(lhs);
    node->rhs_ = std::move(rhs);
    node->a_ = std::move(a);
    node->b_ = std::move(b);
    node->var_ = std::move(var);
    return node;
}

FormulaPtr Formula::eq(Term a, Term b) {
    return make(FormulaKind::Eq, std::move(a), std::move(b), nullptr, nullptr, {});
}

FormulaPtr Formula::parent_of(Term child, Term parent) {
    return make(FormulaKind::ParentOf, std::move(child), std::move(parent), nullptr, nullptr, {});
}

FormulaPtr Formula::negate(FormulaPtr f) {
    return make(FormulaKind::Not, {}, {}, std::move(f), nullptr, {});
}

FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
    return make(FormulaKind::And, {}, {}, std::move(a), std::move(b), {});
}
FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) {
    return make(FormulaKind::Or, {}, {}, std::move(a), std::move(b), {});
}
FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
    return make(FormulaKind::Implies, {}, {}, std::move(a), std::move(b), {});
}
FormulaPtr Formula::iff(FormulaPtr a, FormulaPtr b) {
    return make(FormulaKind::Iff, {}, {}, std::move(a), std::move(b), {});
}

static FormulaPtr quantifier_with_fresh_var(FormulaKind kind, const std::string& v,
                                            FormulaPtr body) {
    if (!valid_var_name(v)) throw ParameterError("invalid variable name '" + v + "'");
    std::set<std::string> bound, all;
    collect_names(body, bound, all);
    std::string var = v;
    if (bound.count(var)) {
        int suffix = 1;
        while (all.count(v + std::to_string(suffix))) ++suffix;
        var = v + std::to_string(suffix);
        body = subst_free(body, v, Term::variable(var));
    }
    return kind == FormulaKind::Exists ? Formula::exists(var, std::move(body))
                                       : Formula::forall(var, std::move(body));
}

FormulaPtr Formula::exists(const std::string& v, FormulaPtr body) {
    std::set<std::string> bound, all;
    collect_names(body, bound, all);
    if (bound.count(v)) return quantifier_with_fresh_var(FormulaKind::Exists, v, std::move(body));
    if (!valid_var_name(v)) throw ParameterError("invalid variable name '" + v + "'");
    return make(FormulaKind::Exists, {}, {}, std::move(body), nullptr, v);
}
FormulaPtr Formula::forall(const std::string& v, FormulaPtr body) {
    std::set<std::string> bound, all;
    collect_names(body, bound, all);
    if (bound.count(v)) return quantifier_with_fresh_var(FormulaKind::Forall, v, std::move(body));
    if (!valid_var_name(v)) throw ParameterError("invalid variable name '" + v + "'");
    return make(FormulaKind::Forall, {}, {}, std::move(body), nullptr, v);
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
    case FormulaKind::Eq:
    case FormulaKind::ParentOf:
        return a->lhs() == b->lhs() && a->rhs() == b->rhs();
    case FormulaKind::Not:
        return equal(a->left(), b->left());
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
        return equal(a->left(), b->left()) && equal(a->right(), b->right());
    case FormulaKind::Exists:
    case FormulaKind::Forall:
        return a->var() == b->var() && equal(a->body(), b->body());
    }
    return false;
}

namespace {

void free_vars_into(const FormulaPtr& f, std::set<std::string>& scope, std::set<std::string>& out) {
    switch (f->kind()) {
    case FormulaKind::Eq:
    case FormulaKind::ParentOf:
        for (const Term* t : {&f->lhs(), &f->rhs()})
            if (!t->is_root && !scope.count(t->var)) out.insert(t->var);
        return;
    case FormulaKind::Not:
        free_vars_into(f->left(), scope, out);
        return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
        free_vars_into(f->left(), scope, out);
        free_vars_into(f->right(), scope, out);
        return;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
        bool added = scope.insert(f->var()).second;
        free_vars_into(f->body(), scope, out);
        if (added) scope.erase(f->var());
        return;
    }
    }
}

} // namespace

std::vector<std::string> free_variables(const FormulaPtr& f) {
    std::set<std::string> scope, out;
    free_vars_into(f, scope, out);
    return {out.begin(), out.end()};
}

bool is_sentence(const FormulaPtr& f) { return free_variables(f).empty(); }

int qd(const FormulaPtr& f) {
    switch (f->kind()) {
    case FormulaKind::Eq:
    case FormulaKind::ParentOf:
        return 0;
    case FormulaKind::Not:
        return qd(f->left());
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
        return std::max(qd(f->left()), qd(f->right()));
    case FormulaKind::Exists:
    case FormulaKind::Forall:
        return 1 + qd(f->body());
    }
    return 0;
}

namespace {

FormulaPtr nnf_rec(const FormulaPtr& f, bool positive) {
    switch (f->kind()) {
    case FormulaKind::Eq:
    case FormulaKind::ParentOf:
        return positive ? f : Formula::negate(f);
    case FormulaKind::Not:
        return nnf_rec(f->left(), !positive);
    case FormulaKind::And:
        return positive
                   ? Formula::conj(nnf_rec(f->left(), true), nnf_rec(f->right(), true))
                   : Formula::disj(nnf_rec(f->left(), false), nnf_rec(f->right(), false));
    case FormulaKind::Or:
        return positive
                   ? Formula::disj(nnf_rec(f->left(), true), nnf_rec(f->right(), true))
                   : Formula::conj(nnf_rec(f->left(), false), nnf_rec(f->right(), false));
    case FormulaKind::Implies:
        // a -> b  ==  !a | b
        return positive
                   ? Formula::disj(nnf_rec(f->left(), false), nnf_rec(f->right(), true))
                   : Formula::conj(nnf_rec(f->left(), true), nnf_rec(f->right(), false));
    case FormulaKind::Iff:
        // a <-> b  ==  (!a | b) & (!b | a); subformula duplication does not
        // change qd/aqd because both take maxima
        if (positive)
            return Formula::conj(
                Formula::disj(nnf_rec(f->left(), false), nnf_rec(f->right(), true)),
                Formula::disj(nnf_rec(f->right(), false), nnf_rec(f->left(), true)));
        return Formula::disj(Formula::conj(nnf_rec(f->left(), true), nnf_rec(f->right(), false)),
                             Formula::conj(nnf_rec(f->right(), true), nnf_rec(f->left(), false)));
    case FormulaKind::Exists:
        return positive ? Formula::exists(f->var(), nnf_rec(f->body(), true))
                        : Formula::forall(f->var(), nnf_rec(f->body(), false));
    case FormulaKind::Forall:
        return positive ? Formula::forall(f->var(), nnf_rec(f->body(), true))
                        : Formula::exists(f->var(), nnf_rec(f->body(), false));
    }
    throw Error("unreachable formula kind");
}

enum class LastQ { None, Ex, All };

int alternations(const FormulaPtr& f, LastQ last) {
    switch (f->kind()) {
    case FormulaKind::Eq:
    case FormulaKind::ParentOf:
        return 0;
    case FormulaKind::Not:
        return alternations(f->left(), last);
    case FormulaKind::And:
    case FormulaKind::Or:
        return std::max(alternations(f->left(), last), alternations(f->right(), last));
    case FormulaKind::Exists:
        return (last == LastQ::All ? 1 : 0) + alternations(f->body(), LastQ::Ex);
    case FormulaKind::Forall:
        return (last == LastQ::Ex ? 1 : 0) + alternations(f->body(), LastQ::All);
    case FormulaKind::Implies:
    case FormulaKind::Iff:
        throw Error("alternation count expects negation normal form");
    }
    return 0;
}

} // namespace

FormulaPtr to_nnf(const FormulaPtr& f) { return nnf_rec(f, true); }

int aqd_syntactic(const FormulaPtr& f) { return alternations(to_nnf(f), LastQ::None); }

// ---------------------------------------------------------------------------
// Evaluation.

FormulaEvaluator::FormulaEvaluator(const Tree& tree, FormulaPtr phi)
    : tree_(tree), root_(std::move(phi)) {
    std::function<void(const FormulaPtr&)> index = [&](const FormulaPtr& f) {
        if (index_.count(f.get())) return;
        index_[f.get()] = static_cast<int>(info_.size());
        info_.push_back(NodeInfo{f.get(), free_variables(f)});
        switch (f->kind()) {
        case FormulaKind::Eq:
        case FormulaKind::ParentOf:
            break;
        case FormulaKind::Not:
        case FormulaKind::Exists:
        case FormulaKind::Forall:
            index(f->left());
            break;
        default:
            index(f->left());
            index(f->right());
        }
    };
    index(root_);
    size_t max_free = 0;
    for (const auto& n : info_) max_free = std::max(max_free, n.free_vars.size());
    packed_keys_ = info_.size() < (1u << 16) && max_free <= 3 && tree_.size() < (1 << 16);
}

NodeId FormulaEvaluator::value_of(const Term& t,
                                  const std::vector<std::pair<std::string, NodeId>>& scope) const {
    if (t.is_root) return tree_.root();
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == t.var) return it->second;
    throw UnboundVariableError("unbound variable '" + t.var + "'");
}

bool FormulaEvaluator::eval_node(const Formula* f,
                                 std::vector<std::pair<std::string, NodeId>>& scope) {
    switch (f->kind()) {
    case FormulaKind::Eq:
        return value_of(f->lhs(), scope) == value_of(f->rhs(), scope);
    case FormulaKind::ParentOf: {
        NodeId child = value_of(f->lhs(), scope);
        NodeId parent = value_of(f->rhs(), scope);
        auto p = tree_.parent(child);
        return p.has_value() && *p == parent; // false for the root: it has no parent
    }
    case FormulaKind::Not:
        return !eval_node(f->left().get(), scope);
    case FormulaKind::And:
        return eval_node(f->left().get(), scope) && eval_node(f->right().get(), scope);
    case FormulaKind::Or:
        return eval_node(f->left().get(), scope) || eval_node(f->right().get(), scope);
    case FormulaKind::Implies:
        return !eval_node(f->left().get(), scope) || eval_node(f->right().get(), scope);
    case FormulaKind::Iff:
        return eval_node(f->left().get(), scope) == eval_node(f->right().get(), scope);
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
        // memoized on (node, values of its free variables): quantifier nodes are
        // where recomputation explodes on nested formulas
        const int idx = index_of(f);
        std::uint64_t packed = 0;
        std::string key;
        if (packed_keys_) {
            packed = static_cast<std::uint64_t>(idx);
            for (const auto& name : info_[static_cast<size_t>(idx)].free_vars)
                packed = (packed << 16) |
                         static_cast<std::uint64_t>(value_of(Term{false, name}, scope));
            if (auto it = memo_packed_.find(packed); it != memo_packed_.end()) return it->second;
        } else {
            key = std::to_string(idx);
            for (const auto& name : info_[static_cast<size_t>(idx)].free_vars) {
                key += ',';
                key += std::to_string(value_of(Term{false, name}, scope));
            }
            if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        }
        const bool want_all = f->kind() == FormulaKind::Forall;
        bool result = want_all;
        scope.emplace_back(f->var(), 0);
        for (NodeId v = 0; v < tree_.size(); ++v) {
            scope.back().second = v;
            bool sub = eval_node(f->body().get(), scope);
            if (want_all && !sub) {
                result = false;
                break;
            }
            if (!want_all && sub) {
                result = true;
                break;
            }
        }
        scope.pop_back();
        if (packed_keys_)
            memo_packed_[packed] = result;
        else
            memo_[key] = result;
        return result;
    }
    }
    throw Error("unreachable formula kind");
}

bool FormulaEvaluator::eval(const Assignment& env) {
    auto fv = free_variables(root_);
    std::vector<std::pair<std::string, NodeId>> scope;
    scope.reserve(env.size());
    for (const auto& name : fv) {
        auto it = env.find(name);
        if (it == env.end()) throw UnboundVariableError("assignment misses variable '" + name + "'");
        if (!tree_.valid_id(it->second))
            throw StructureError("assignment maps '" + name + "' to an invalid vertex");
        scope.emplace_back(name, it->second);
    }
    return eval_node(root_.get(), scope);
}

bool eval_formula(const Tree& tree, const FormulaPtr& phi, const Assignment& env) {
    FormulaEvaluator ev(tree, phi);
    return ev.eval(env);
}

// ---------------------------------------------------------------------------
// The recursive property family.

namespace {

FormulaPtr build_P(int i, const Term& subject, int level) {
    std::string name = "y" + std::to_string(level);
    Term y = Term::variable(name);
    if (i == 0) return Formula::forall(name, Formula::negate(Formula::parent_of(y, subject)));
    return Formula::forall(
        name, Formula::implies(Formula::parent_of(y, subject),
                               Formula::negate(build_P(i - 1, y, level + 1))));
}

} // namespace

FormulaPtr formula_for_P(int i, const Term& subject) {
    if (i < 0) throw ParameterError("property index must be >= 0");
    return build_P(i, subject, 1);
}

FormulaPtr formula_for_KEIN(int i) { return formula_for_P(i, Term::root()); }

bool eval_P_direct(const Tree& tree, int i, NodeId v) {
    if (i < 0) throw ParameterError("property index must be >= 0");
    if (!tree.valid_id(v)) throw StructureError("eval_P_direct: invalid vertex");
    std::unordered_map<long long, bool> memo;
    std::function<bool(int, NodeId)> rec = [&](int level, NodeId x) -> bool {
        long long key = static_cast<long long>(level) * tree.size() + x;
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        bool result = true;
        if (level == 0) {
            result = tree.children(x).empty();
        } else {
            for (NodeId c : tree.children(x)) {
                if (rec(level - 1, c)) {
                    result = false;
                    break;
                }
            }
        }
        memo[key] = result;
        return result;
    };
    return rec(i, v);
}

// ---------------------------------------------------------------------------
// Surface syntax.

namespace {

struct Token {
    enum Kind { Ident, Root, ExistsKw, ForallKw, PiKw, Eq, LParen, RParen, Dot, Bang, Amp, Pipe,
                Arrow, DArrow, End } kind;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }
    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ >= src_.size()) {
            tok_ = {Token::End, ""};
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                    src_[pos_] == '\''))
                ++pos_;
            std::string word = src_.substr(start, pos_ - start);
            if (word == "R") tok_ = {Token::Root, word};
            else if (word == "E") tok_ = {Token::ExistsKw, word};
            else if (word == "A") tok_ = {Token::ForallKw, word};
            else if (word == "pi") tok_ = {Token::PiKw, word};
            else tok_ = {Token::Ident, word};
            return;
        }
        ++pos_;
        switch (c) {
        case '=': tok_ = {Token::Eq, "="}; return;
        case '(': tok_ = {Token::LParen, "("}; return;
        case ')': tok_ = {Token::RParen, ")"}; return;
        case '.': tok_ = {Token::Dot, "."}; return;
        case '!': tok_ = {Token::Bang, "!"}; return;
        case '&': tok_ = {Token::Amp, "&"}; return;
        case '|': tok_ = {Token::Pipe, "|"}; return;
        case '-':
            if (pos_ < src_.size() && src_[pos_] == '>') {
                ++pos_;
                tok_ = {Token::Arrow, "->"};
                return;
            }
            throw ParseError("stray '-' in formula");
        case '<':
            if (pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] == '>') {
                pos_ += 2;
                tok_ = {Token::DArrow, "<->"};
                return;
            }
            throw ParseError("stray '<' in formula");
        default:
            throw ParseError(std::string("unexpected character '") + c + "' in formula");
        }
    }

    const std::string& src_;
    size_t pos_ = 0;
    Token tok_{Token::End, ""};
};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    FormulaPtr parse() {
        auto f = parse_iff();
        if (lex_.peek().kind != Token::End)
            throw ParseError("trailing input after formula: '" + lex_.peek().text + "'");
        return f;
    }

private:
    Lexer lex_;

    void expect(Token::Kind k, const char* what) {
        if (lex_.peek().kind != k) throw ParseError(std::string("expected ") + what);
        lex_.take();
    }

    FormulaPtr parse_iff() {
        auto a = parse_impl();
        while (lex_.peek().kind == Token::DArrow) {
            lex_.take();
            a = Formula::iff(a, parse_impl());
        }
        return a;
    }

    FormulaPtr parse_impl() {
        auto a = parse_or();
        if (lex_.peek().kind == Token::Arrow) {
            lex_.take();
            return Formula::implies(a, parse_impl()); // right-associative
        }
        return a;
    }

    FormulaPtr parse_or() {
        auto a = parse_and();
        while (lex_.peek().kind == Token::Pipe) {
            lex_.take();
            a = Formula::disj(a, parse_and());
        }
        return a;
    }

    FormulaPtr parse_and() {
        auto a = parse_unary();
        while (lex_.peek().kind == Token::Amp) {
            lex_.take();
            a = Formula::conj(a, parse_unary());
        }
        return a;
    }

    Term parse_term() {
        if (lex_.peek().kind == Token::Root) {
            lex_.take();
            return Term::root();
        }
        if (lex_.peek().kind == Token::Ident) return Term::variable(lex_.take().text);
        throw ParseError("expected a term (variable or R)");
    }

    FormulaPtr parse_unary() {
        switch (lex_.peek().kind) {
        case Token::Bang:
            lex_.take();
            return Formula::negate(parse_unary());
        case Token::ExistsKw:
        case Token::ForallKw: {
            bool ex = lex_.take().kind == Token::ExistsKw;
            if (lex_.peek().kind != Token::Ident) throw ParseError("expected variable after quantifier");
            std::string v = lex_.take().text;
            expect(Token::Dot, "'.' after quantified variable");
            auto body = parse_iff(); // body extends as far right as possible
            return ex ? Formula::exists(v, body) : Formula::forall(v, body);
        }
        case Token::LParen: {
            lex_.take();
            auto f = parse_iff();
            expect(Token::RParen, "')'");
            return f;
        }
        case Token::PiKw: {
            lex_.take();
            expect(Token::LParen, "'(' after pi");
            Term child = parse_term();
            expect(Token::RParen, "')'");
            expect(Token::Eq, "'='");
            Term parent = parse_term();
            return Formula::parent_of(child, parent);
        }
        case Token::Root:
        case Token::Ident: {
            Term a = parse_term();
            expect(Token::Eq, "'='");
            Term b = parse_term();
            return Formula::eq(a, b);
        }
        default:
            throw ParseError("expected a formula");
        }
    }
};

int precedence(FormulaKind k) {
    switch (k) {
    case FormulaKind::Iff: return 1;
    case FormulaKind::Implies: return 2;
    case FormulaKind::Or: return 3;
    case FormulaKind::And: return 4;
    case FormulaKind::Not: return 5;
    case FormulaKind::Eq:
    case FormulaKind::ParentOf: return 6;
    case FormulaKind::Exists:
    case FormulaKind::Forall: return 0;
    }
    return 6;
}

std::string print_term(const Term& t) { return t.is_root ? "R" : t.var; }

void render(const FormulaPtr& f, int min_prec, std::string& out) {
    const int own = precedence(f->kind());
    const bool parens = own < min_prec;
    if (parens) out += '(';
    switch (f->kind()) {
    case FormulaKind::Eq:
        out += print_term(f->lhs());
        out += " = ";
        out += print_term(f->rhs());
        break;
    case FormulaKind::ParentOf:
        out += "pi(";
        out += print_term(f->lhs());
        out += ") = ";
        out += print_term(f->rhs());
        break;
    case FormulaKind::Not:
        out += '!';
        render(f->left(), 5, out);
        break;
    case FormulaKind::And:
        render(f->left(), 4, out);
        out += " & ";
        render(f->right(), 5, out);
        break;
    case FormulaKind::Or:
        render(f->left(), 3, out);
        out += " | ";
        render(f->right(), 4, out);
        break;
    case FormulaKind::Implies:
        render(f->left(), 3, out);
        out += " -> ";
        render(f->right(), 2, out);
        break;
    case FormulaKind::Iff:
        render(f->left(), 1, out);
        out += " <-> ";
        render(f->right(), 2, out);
        break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
        out += f->kind() == FormulaKind::Exists ? "E " : "A ";
        out += f->var();
        out += " . ";
        render(f->body(), 0, out);
        break;
    }
    if (parens) out += ')';
}

} // namespace

FormulaPtr parse_formula(const std::string& text) { return Parser(text).parse(); }

std::string print_formula(const FormulaPtr& f) {
    std::string out;
    render(f, 0, out);
    return out;
}

} // namespace efg
