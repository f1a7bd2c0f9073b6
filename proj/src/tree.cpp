#include "efg/tree.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace efg {

std::string role_name(Role r) { return r == Role::T1 ? "T1" : "T2"; }

Role role_from_name(const std::string& name) {
    if (name == "T1") return Role::T1;
    if (name == "T2") return Role::T2;
    throw ParseError("unknown role '" + name + "' (expected T1 or T2)");
}

const NodeRecord& Tree::node(NodeId v) const {
    if (!valid_id(v)) throw StructureError("invalid node id " + std::to_string(v));
    return nodes_[static_cast<size_t>(v)];
}

void Tree::build_intervals() {
    const int n = size();
    tin_.assign(static_cast<size_t>(n), -1);
    tout_.assign(static_cast<size_t>(n), -1);
    int clock = 0;
    // iterative DFS; trees can be deep in principle
    std::vector<std::pair<NodeId, size_t>> stack;
    tin_[0] = clock++;
    stack.emplace_back(0, 0);
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        const auto& ch = nodes_[static_cast<size_t>(v)].children;
        if (next < ch.size()) {
            NodeId c = ch[next++];
            tin_[static_cast<size_t>(c)] = clock++;
            stack.emplace_back(c, 0);
        } else {
            tout_[static_cast<size_t>(v)] = clock++;
            stack.pop_back();
        }
    }
}

bool Tree::in_subtree(NodeId anc, NodeId v) const {
    if (!valid_id(anc) || !valid_id(v)) return false;
    return tin_[static_cast<size_t>(anc)] <= tin_[static_cast<size_t>(v)] &&
           tout_[static_cast<size_t>(v)] <= tout_[static_cast<size_t>(anc)];
}

NodeId Tree::child_towards(NodeId anc, NodeId v) const {
    if (v == anc || !in_subtree(anc, v))
        throw StructureError("child_towards: vertex not strictly below ancestor");
    NodeId cur = v;
    while (true) {
        NodeId p = nodes_[static_cast<size_t>(cur)].parent.value();
        if (p == anc) return cur;
        cur = p;
    }
}

std::optional<Blueprint> Tree::construction_tag(NodeId v) const {
    auto it = tags_.find(v);
    if (it == tags_.end()) return std::nullopt;
    return it->second;
}

Tree Tree::from_parents(const std::vector<std::optional<NodeId>>& parents,
                        std::optional<Blueprint> blueprint) {
    const int n = static_cast<int>(parents.size());
    if (n == 0) throw StructureError("tree must have at least one node");
    Tree t;
    t.nodes_.resize(static_cast<size_t>(n));
    int root_count = 0;
    for (NodeId v = 0; v < n; ++v) {
        t.nodes_[static_cast<size_t>(v)].id = v;
        t.nodes_[static_cast<size_t>(v)].parent = parents[static_cast<size_t>(v)];
        if (!parents[static_cast<size_t>(v)]) {
            ++root_count;
            if (v != 0) throw StructureError("root must be node 0");
        } else {
            NodeId p = *parents[static_cast<size_t>(v)];
            if (p < 0 || p >= n) throw StructureError("parent id out of range");
            if (p == v) throw StructureError("node is its own parent");
            t.nodes_[static_cast<size_t>(p)].children.push_back(v);
        }
    }
    if (root_count != 1) throw StructureError("tree must have exactly one parentless node");
    for (auto& rec : t.nodes_) std::sort(rec.children.begin(), rec.children.end());
    // reachability from the root doubles as the acyclicity check
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<NodeId> todo{0};
    seen[0] = 1;
    int reached = 0;
    while (!todo.empty()) {
        NodeId v = todo.back();
        todo.pop_back();
        ++reached;
        for (NodeId c : t.nodes_[static_cast<size_t>(v)].children) {
            if (!seen[static_cast<size_t>(c)]) {
                seen[static_cast<size_t>(c)] = 1;
                todo.push_back(c);
            }
        }
    }
    if (reached != n)
        throw StructureError("parent links contain a cycle or an unreachable node");
    t.blueprint_ = blueprint;
    if (blueprint) {
        if (blueprint->s < 1 || blueprint->k < 1 || blueprint->m < 1)
            throw StructureError("blueprint parameters must be positive");
        if (blueprint->m < blueprint->s * blueprint->k)
            throw StructureError("blueprint violates m >= s*k");
        if (static_cast<int>(t.nodes_[0].children.size()) != blueprint->m + 1)
            throw StructureError("blueprint demands m+1 top-level children");
    }
    t.build_intervals();
    return t;
}

long long construction_size(Role role, int s, int m) {
    if (s == 1) {
        long long mm = m;
        return role == Role::T1 ? 1 + (mm + 1) * (mm + 1) : 1 + (mm + 1) + mm * mm;
    }
    long long t1 = construction_size(Role::T1, s - 1, m);
    long long t2 = construction_size(Role::T2, s - 1, m);
    return role == Role::T1 ? 1 + (m + 1) * t2 : 1 + m * t2 + t1;
}

Tree build_construction(Role role, int s, int k, int m) {
    if (s < 1 || k < 1 || m < 1)
        throw ParameterError("construction needs s >= 1, k >= 1, m >= 1");
    if (m < s * k)
        throw ParameterError("construction needs m >= s*k (got m=" + std::to_string(m) +
                             ", s*k=" + std::to_string(s * k) + ")");

    Tree t;
    t.blueprint_ = Blueprint{role, s, k, m};
    auto new_node = [&t](std::optional<NodeId> parent) {
        NodeId id = static_cast<NodeId>(t.nodes_.size());
        t.nodes_.push_back(NodeRecord{id, parent, {}});
        if (parent) t.nodes_[static_cast<size_t>(*parent)].children.push_back(id);
        return id;
    };

    // Emits the copy of T_r^(level,k,m) hanging from `parent`; returns its root.
    std::function<NodeId(std::optional<NodeId>, Role, int)> emit =
        [&](std::optional<NodeId> parent, Role r, int level) -> NodeId {
        NodeId self = new_node(parent);
        t.tags_[self] = Blueprint{r, level, k, m};
        if (level == 1) {
            if (r == Role::T1) {
                for (int i = 0; i < m + 1; ++i) {
                    NodeId u = new_node(self);
                    for (int j = 0; j < m; ++j) new_node(u);
                }
            } else {
                for (int i = 0; i < m; ++i) {
                    NodeId v = new_node(self);
                    for (int j = 0; j < m; ++j) new_node(v);
                }
                new_node(self); // the childless last child
            }
        } else {
            if (r == Role::T1) {
                for (int i = 0; i < m + 1; ++i) emit(self, Role::T2, level - 1);
            } else {
                for (int i = 0; i < m; ++i) emit(self, Role::T2, level - 1);
                emit(self, Role::T1, level - 1);
            }
        }
        return self;
    };
    emit(std::nullopt, role, s);
    t.build_intervals();
    return t;
}

// ---------------------------------------------------------------------------
// Canonical codes.

namespace {

std::string code_below(const Tree& tree, NodeId v) {
    const auto& ch = tree.children(v);
    if (ch.empty()) return "()";
    std::vector<std::string> parts;
    parts.reserve(ch.size());
    for (NodeId c : ch) parts.push_back(code_below(tree, c));
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    for (const auto& p : parts) out += p;
    out += ")";
    return out;
}

} // namespace

std::string canonical_code(const Tree& tree, NodeId v) {
    if (!tree.valid_id(v)) throw StructureError("canonical_code: invalid node id");
    return code_below(tree, v);
}

CanonicalTable::CanonicalTable(const Tree& tree) {
    codes_.resize(static_cast<size_t>(tree.size()));
    // children have larger preorder interval starts, but ids are arbitrary;
    // compute by depth, deepest first
    std::vector<NodeId> order;
    order.reserve(codes_.size());
    std::vector<NodeId> todo{tree.root()};
    while (!todo.empty()) {
        NodeId v = todo.back();
        todo.pop_back();
        order.push_back(v);
        for (NodeId c : tree.children(v)) todo.push_back(c);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeId v = *it;
        const auto& ch = tree.children(v);
        if (ch.empty()) {
            codes_[static_cast<size_t>(v)] = "()";
            continue;
        }
        std::vector<std::string> parts;
        parts.reserve(ch.size());
        for (NodeId c : ch) parts.push_back(codes_[static_cast<size_t>(c)]);
        std::sort(parts.begin(), parts.end());
        std::string out = "(";
        for (const auto& p : parts) out += p;
        out += ")";
        codes_[static_cast<size_t>(v)] = std::move(out);
    }
}

NodeId IsoMap::apply(NodeId v) const {
    auto it = forward.find(v);
    if (it == forward.end())
        throw StructureError("IsoMap::apply: vertex outside source subtree");
    return it->second;
}

NodeId IsoMap::invert(NodeId v) const {
    auto it = backward.find(v);
    if (it == backward.end())
        throw StructureError("IsoMap::invert: vertex outside target subtree");
    return it->second;
}

IsoMap construction_isomorphism(const Tree& treeA, NodeId a, const Tree& treeB, NodeId b,
                                const CanonicalTable* tableA, const CanonicalTable* tableB) {
    std::optional<CanonicalTable> ownA, ownB;
    if (!tableA) {
        ownA.emplace(treeA);
        tableA = &*ownA;
    }
    if (!tableB) {
        ownB.emplace(treeB);
        tableB = &*ownB;
    }
    if (tableA->code(a) != tableB->code(b))
        throw NotIsomorphicError("subtrees are not root-preserving isomorphic");

    IsoMap iso;
    iso.source_root = a;
    iso.target_root = b;
    std::vector<std::pair<NodeId, NodeId>> todo{{a, b}};
    while (!todo.empty()) {
        auto [x, y] = todo.back();
        todo.pop_back();
        iso.forward[x] = y;
        iso.backward[y] = x;
        auto order = [&](const Tree& t, const CanonicalTable& tab, NodeId v) {
            std::vector<NodeId> ch = t.children(v);
            std::sort(ch.begin(), ch.end(), [&](NodeId l, NodeId r) {
                const auto& cl = tab.code(l);
                const auto& cr = tab.code(r);
                return cl != cr ? cl < cr : l < r;
            });
            return ch;
        };
        auto cx = order(treeA, *tableA, x);
        auto cy = order(treeB, *tableB, y);
        // codes match at the parent, so the sorted child code sequences agree
        for (size_t i = 0; i < cx.size(); ++i) todo.emplace_back(cx[i], cy[i]);
    }
    return iso;
}

// ---------------------------------------------------------------------------
// Serialization.

std::string serialize(const Tree& tree, TreeFormat format) {
    if (format == TreeFormat::Json) {
        nlohmann::json j;
        j["root"] = tree.root();
        auto& nodes = j["nodes"] = nlohmann::json::array();
        for (NodeId v = 0; v < tree.size(); ++v) {
            nlohmann::json n;
            n["id"] = v;
            if (tree.parent(v))
                n["parent"] = *tree.parent(v);
            else
                n["parent"] = nullptr;
            nodes.push_back(std::move(n));
        }
        if (tree.blueprint()) {
            const auto& bp = *tree.blueprint();
            j["blueprint"] = {{"role", role_name(bp.role)}, {"s", bp.s}, {"k", bp.k}, {"m", bp.m}};
        }
        return j.dump(2) + "\n";
    }
    // DOT export: one edge line per parent->child edge, root styled distinctly
    std::ostringstream out;
    out << "digraph tree {\n";
    out << "  " << tree.root() << " [shape=doublecircle];\n";
    for (NodeId v = 0; v < tree.size(); ++v)
        for (NodeId c : tree.children(v)) out << "  " << v << " -> " << c << ";\n";
    out << "}\n";
    return out.str();
}

Tree deserialize(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid tree JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("root") || !j.contains("nodes") || !j["nodes"].is_array())
        throw ParseError("tree JSON must be an object with 'root' and 'nodes'");
    if (!j["root"].is_number_integer())
        throw ParseError("'root' must be an integer");
    const auto& nodes = j["nodes"];
    const size_t n = nodes.size();
    std::vector<std::optional<NodeId>> parents(n);
    std::vector<char> present(n, 0);
    for (const auto& rec : nodes) {
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("parent"))
            throw ParseError("each node needs 'id' and 'parent'");
        if (!rec["id"].is_number_integer())
            throw ParseError("node 'id' must be an integer");
        const long long idl = rec["id"].get<long long>();
        if (idl < 0 || idl >= static_cast<long long>(n))
            throw StructureError("node ids must be dense 0..n-1");
        const auto id = static_cast<size_t>(idl);
        if (present[id]) throw StructureError("duplicate node id");
        present[id] = 1;
        if (rec["parent"].is_null())
            parents[id] = std::nullopt;
        else if (rec["parent"].is_number_integer())
            parents[id] = rec["parent"].get<NodeId>();
        else
            throw ParseError("node 'parent' must be an integer or null");
    }
    if (j["root"].get<NodeId>() != 0)
        throw StructureError("'root' must be node 0");
    std::optional<Blueprint> bp;
    if (j.contains("blueprint")) {
        const auto& b = j["blueprint"];
        if (!b.is_object() || !b.contains("role") || !b.contains("s") || !b.contains("k") ||
            !b.contains("m"))
            throw ParseError("blueprint needs role, s, k, m");
        bp = Blueprint{role_from_name(b["role"].get<std::string>()), b["s"].get<int>(),
                       b["k"].get<int>(), b["m"].get<int>()};
    }
    return Tree::from_parents(parents, bp);
}

Tree load_tree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open tree file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

void save_tree_file(const Tree& tree, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write tree file '" + path + "'");
    out << serialize(tree, TreeFormat::Json);
}

} // namespace efg
