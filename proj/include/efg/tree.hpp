#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "efg/errors.hpp"

namespace efg {

using NodeId = int;

struct NodeRecord {
    NodeId id = 0;
    std::optional<NodeId> parent;
    std::vector<NodeId> children; // sorted ascending
};

enum class Role { T1, T2 };

std::string role_name(Role r);
Role role_from_name(const std::string& name);

/// Recipe of a recursively built tree: which family member this is.
struct Blueprint {
    Role role = Role::T1;
    int s = 1;
    int k = 1;
    int m = 1;
};

/// Finite rooted tree. Nodes are dense ids 0..n-1, root is always 0,
/// child lists are sorted, parent links are acyclic and reach everything.
/// Immutable once built; safe to share across threads.
class Tree {
public:
    static Tree from_parents(const std::vector<std::optional<NodeId>>& parents,
                             std::optional<Blueprint> blueprint = std::nullopt);

    int size() const { return static_cast<int>(nodes_.size()); }
    NodeId root() const { return 0; }
    const NodeRecord& node(NodeId v) const;
    std::optional<NodeId> parent(NodeId v) const { return node(v).parent; }
    const std::vector<NodeId>& children(NodeId v) const { return node(v).children; }
    bool valid_id(NodeId v) const { return v >= 0 && v < size(); }

    /// True iff v lies in the subtree rooted at anc (v == anc counts).
    bool in_subtree(NodeId anc, NodeId v) const;
    /// Number of nodes in the subtree rooted at v.
    int subtree_size(NodeId v) const { return (tout_[v] - tin_[v]) / 2 + 1; }
    /// The child of anc on the path from anc down to v; requires v strictly below anc.
    NodeId child_towards(NodeId anc, NodeId v) const;

    const std::optional<Blueprint>& blueprint() const { return blueprint_; }
    /// For trees produced by build_construction: the family member rooted at v,
    /// if v is the root of a full recursive copy.
    std::optional<Blueprint> construction_tag(NodeId v) const;

private:
    std::vector<NodeRecord> nodes_;
    std::optional<Blueprint> blueprint_;
    std::unordered_map<NodeId, Blueprint> tags_;
    std::vector<int> tin_, tout_; // preorder intervals for O(1) subtree tests

    void build_intervals();
    friend Tree build_construction(Role, int, int, int);
};

/// Builds the recursive family member T1^(s,k,m) or T2^(s,k,m).
/// Ids are assigned in construction order: root first, then each top-level
/// child's subtree in full, so every recursive copy occupies a contiguous
/// id range. Throws ParameterError unless s >= 1, k >= 1 and m >= s*k.
Tree build_construction(Role role, int s, int k, int m);

/// Node count of T_role^(s,k,m) without building it.
long long construction_size(Role role, int s, int m);

// ---------------------------------------------------------------------------
// Canonical codes (AHU) and root-preserving isomorphisms.

/// Canonical parenthesis string of the subtree rooted at v. Two subtrees get
/// equal codes iff they are isomorphic by a root-preserving map.
std::string canonical_code(const Tree& tree, NodeId v);

/// All subtree codes of a tree, computed once. Shareable, read-only.
class CanonicalTable {
public:
    explicit CanonicalTable(const Tree& tree);
    const std::string& code(NodeId v) const { return codes_[static_cast<size_t>(v)]; }

private:
    std::vector<std::string> codes_;
};

/// Root-preserving isomorphism between two subtrees (possibly of different trees).
struct IsoMap {
    NodeId source_root = 0;
    NodeId target_root = 0;
    std::unordered_map<NodeId, NodeId> forward;
    std::unordered_map<NodeId, NodeId> backward;

    NodeId apply(NodeId v) const;
    NodeId invert(NodeId v) const;
    bool in_domain(NodeId v) const { return forward.count(v) != 0; }
    bool in_range(NodeId v) const { return backward.count(v) != 0; }
};

/// Deterministic root-preserving isomorphism from subtree(a) of treeA onto
/// subtree(b) of treeB. Children are matched by (canonical code, lowest id),
/// so repeated calls produce the same map. Throws NotIsomorphicError if the
/// subtrees' canonical codes differ. Passing precomputed tables avoids
/// recomputing codes.
IsoMap construction_isomorphism(const Tree& treeA, NodeId a,
                                const Tree& treeB, NodeId b,
                                const CanonicalTable* tableA = nullptr,
                                const CanonicalTable* tableB = nullptr);

// ---------------------------------------------------------------------------
// Serialization.

enum class TreeFormat { Json, Dot };

std::string serialize(const Tree& tree, TreeFormat format);
/// Parses the JSON produced by serialize(..., Json). Validates all Tree
/// invariants; throws ParseError / StructureError.
Tree deserialize(const std::string& bytes);

Tree load_tree_file(const std::string& path);
void save_tree_file(const Tree& tree, const std::string& path);

} // namespace efg
